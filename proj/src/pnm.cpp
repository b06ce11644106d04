#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "edgedam/media.hpp"

namespace edgedam {

namespace {

class HeaderCursor {
 public:
  HeaderCursor(std::span<const std::uint8_t> bytes, const std::string& name)
      : bytes_(bytes), name_(name) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  int read_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) fail("malformed header");
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 1'000'000) fail("header value out of range");
    }
    return static_cast<int>(v);
  }

  // Exactly one whitespace byte separates the header from the raster.
  void end_header() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) fail("malformed header");
    ++pos_;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error(name_ + ": " + what);
  }

 private:
  std::span<const std::uint8_t> bytes_;
  const std::string& name_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> header,
                std::span<const std::uint8_t> body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(header.data()), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

std::vector<std::uint8_t> make_header(const char* magic, FrameDims dims) {
  const std::string h = std::string(magic) + "\n" + std::to_string(dims.width()) + " " +
                        std::to_string(dims.height()) + "\n255\n";
  return {h.begin(), h.end()};
}

bool is_pnm_file(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".ppm" || ext == ".pgm";
}

}  // namespace

RgbImage decode_pnm(std::span<const std::uint8_t> bytes, const std::string& name) {
  HeaderCursor cur(bytes, name);
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '6' && bytes[1] != '5')) {
    cur.fail("unsupported format (expected binary PPM P6 or PGM P5)");
  }
  const bool color = bytes[1] == '6';
  cur.advance(2);
  const int w = cur.read_int();
  const int h = cur.read_int();
  const int maxval = cur.read_int();
  if (w < 1 || h < 1) cur.fail("invalid dimensions");
  if (maxval != 255) cur.fail("unsupported maxval " + std::to_string(maxval));
  cur.end_header();

  const FrameDims dims(w, h);
  const std::size_t n = static_cast<std::size_t>(dims.pixel_count()) * (color ? 3 : 1);
  if (bytes.size() - cur.pos() < n) cur.fail("truncated raster");
  const auto raster = bytes.subspan(cur.pos(), n);
  if (color) return RgbImage(dims, std::vector<std::uint8_t>(raster.begin(), raster.end()));

  std::vector<std::uint8_t> rgb(n * 3);
  for (std::size_t i = 0; i < n; ++i) rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = raster[i];
  return RgbImage(dims, std::move(rgb));
}

std::vector<std::uint8_t> encode_ppm(const RgbImage& image) {
  std::vector<std::uint8_t> out = make_header("P6", image.dims());
  out.insert(out.end(), image.bytes().begin(), image.bytes().end());
  return out;
}

RgbImage read_pnm(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode_pnm(bytes, path.string());
}

void write_ppm(const std::filesystem::path& path, const RgbImage& image) {
  write_file(path, make_header("P6", image.dims()), image.bytes());
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  write_file(path, make_header("P5", image.dims()), image.values());
}

SequenceReader::SequenceReader(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw std::runtime_error(dir.string() + ": not a directory");
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_pnm_file(entry.path())) files_.push_back(entry.path());
  }
  if (files_.empty()) throw std::runtime_error(dir.string() + ": no frames");
  std::sort(files_.begin(), files_.end(),
            [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
  dims_ = read_pnm(files_.front()).dims();
}

Frame SequenceReader::frame(std::size_t t) const {
  if (t >= files_.size()) throw std::out_of_range("frame index past end of sequence");
  Frame f{read_pnm(files_[t]), static_cast<std::int64_t>(t)};
  if (f.dims() != dims_) {
    throw std::runtime_error(files_[t].string() + ": dimensions " +
                             std::to_string(f.dims().width()) + "x" +
                             std::to_string(f.dims().height()) + " differ from first frame");
  }
  return f;
}

std::vector<Frame> load_sequence(const std::filesystem::path& dir) {
  SequenceReader reader(dir);
  std::vector<Frame> frames;
  frames.reserve(reader.size());
  for (std::size_t t = 0; t < reader.size(); ++t) frames.push_back(reader.frame(t));
  return frames;
}

}  // namespace edgedam
