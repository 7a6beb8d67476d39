#include "egosum/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>
#include <sstream>

#include "egosum/io.hpp"

#ifdef EGOSUM_HAVE_OPENCV
#include <opencv2/imgcodecs.hpp>
#endif

namespace egosum {

std::vector<double> extract_histogram(const RgbImage& image, const HistogramConfig& config) {
  if (config.bins_per_channel < 2) throw ValidationError("bins_per_channel must be at least 2");
  if (image.channels != 3) {
    throw ValidationError("expected an RGB image, got " + std::to_string(image.channels) + " channels");
  }
  const std::size_t pixel_count = image.width * image.height;
  if (pixel_count == 0) throw ValidationError("empty image");
  if (image.pixels.size() != pixel_count * 3) {
    throw ValidationError("pixel buffer does not match image size");
  }

  const std::size_t bins = config.bins_per_channel;
  std::vector<std::size_t> counts(3 * bins, 0);
  for (std::size_t p = 0; p < pixel_count; ++p) {
    for (std::size_t c = 0; c < 3; ++c) {
      const std::size_t value = image.pixels[3 * p + c];
      counts[c * bins + value * bins / 256]++;
    }
  }
  std::vector<double> hist(counts.size());
  const double total = static_cast<double>(pixel_count);
  for (std::size_t k = 0; k < counts.size(); ++k) hist[k] = static_cast<double>(counts[k]) / total;
  return hist;
}

NormalizedVector l2_normalize(std::span<const double> v) {
  double sq = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) throw ValidationError("cannot normalize a non-finite vector");
    sq += x * x;
  }
  NormalizedVector out{{v.begin(), v.end()}, false};
  if (sq == 0.0) {
    out.zero_norm = true;
    return out;
  }
  const double norm = std::sqrt(sq);
  for (double& x : out.values) x /= norm;
  return out;
}

Photostream normalize_stream(const Photostream& stream) {
  std::vector<FrameDescriptor> frames = stream.frames();
  for (auto& f : frames) f.features = l2_normalize(f.features).values;
  return Photostream::create(stream.day_id(), std::move(frames), stream.synthetic_timestamps());
}

namespace {

std::string next_ppm_token(std::istream& in) {
  std::string token;
  char ch = 0;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      token.push_back(ch);
      break;
    }
  }
  while (in.get(ch) && !std::isspace(static_cast<unsigned char>(ch))) token.push_back(ch);
  return token;
}

std::size_t parse_ppm_number(const std::string& token, const std::filesystem::path& path) {
  if (token.empty() || !std::all_of(token.begin(), token.end(), ::isdigit)) {
    throw ValidationError("malformed PPM header in " + path.string());
  }
  return std::stoul(token);
}

}  // namespace

RgbImage read_ppm(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  const std::string magic = next_ppm_token(in);
  if (magic != "P6" && magic != "P3") throw ValidationError(path.string() + " is not an RGB PPM");
  RgbImage img;
  img.width = parse_ppm_number(next_ppm_token(in), path);
  img.height = parse_ppm_number(next_ppm_token(in), path);
  if (parse_ppm_number(next_ppm_token(in), path) != 255) {
    throw ValidationError(path.string() + ": only 8-bit PPM (maxval 255) is supported");
  }
  img.pixels.resize(img.width * img.height * 3);
  if (magic == "P6") {
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    if (static_cast<std::size_t>(in.gcount()) != img.pixels.size()) {
      throw ValidationError(path.string() + ": truncated pixel data");
    }
  } else {
    for (auto& px : img.pixels) {
      const auto v = parse_ppm_number(next_ppm_token(in), path);
      if (v > 255) throw ValidationError(path.string() + ": sample exceeds maxval");
      px = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

RgbImage read_image(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
  if (ext == ".ppm") return read_ppm(path);
#ifdef EGOSUM_HAVE_OPENCV
  const cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw ValidationError("cannot decode image " + path.string());
  RgbImage img;
  img.width = static_cast<std::size_t>(bgr.cols);
  img.height = static_cast<std::size_t>(bgr.rows);
  img.pixels.resize(img.width * img.height * 3);
  for (int r = 0; r < bgr.rows; ++r) {
    const auto* row = bgr.ptr<cv::Vec3b>(r);
    for (int c = 0; c < bgr.cols; ++c) {
      const std::size_t p = 3 * (static_cast<std::size_t>(r) * img.width + static_cast<std::size_t>(c));
      img.pixels[p] = row[c][2];
      img.pixels[p + 1] = row[c][1];
      img.pixels[p + 2] = row[c][0];
    }
  }
  return img;
#else
  throw ValidationError("unsupported image format " + path.string() + " (built without OpenCV)");
#endif
}

Timestamp timestamp_from_filename(const std::string& filename) {
  static const std::regex pattern(R"((\d{4})(\d{2})(\d{2})_?(\d{2})(\d{2})(\d{2}))");
  std::smatch m;
  if (!std::regex_search(filename, m, pattern)) {
    throw ValidationError("no YYYYMMDD_HHMMSS timestamp in file name '" + filename + "'");
  }
  const std::string iso = m[1].str() + "-" + m[2].str() + "-" + m[3].str() + "T" + m[4].str() + ":" +
                          m[5].str() + ":" + m[6].str() + "Z";
  return parse_iso8601(iso);
}

namespace {

bool is_image_file(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
  return ext == ".ppm" || ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".bmp";
}

Timestamp modification_time(const std::filesystem::path& p) {
  const auto ft = std::filesystem::last_write_time(p);
  const auto sys = std::chrono::file_clock::to_sys(ft);
  return std::chrono::time_point_cast<std::chrono::milliseconds>(sys);
}

}  // namespace

Photostream extract_directory(const std::filesystem::path& dir, const ExtractOptions& options,
                              std::vector<std::string>& warnings) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  struct Pending {
    Timestamp timestamp;
    std::string id;
    std::vector<double> features;
  };
  std::vector<Pending> pending;
  for (const auto& file : files) {
    const std::string name = file.filename().string();
    Timestamp ts = options.timestamps == TimestampSource::kFilenamePattern
                       ? timestamp_from_filename(name)
                       : modification_time(file);
    std::vector<double> features;
    try {
      features = extract_histogram(read_image(file), options.histogram);
    } catch (const ValidationError& e) {
      warnings.push_back(std::string("skipping ") + e.what());
      continue;
    }
    if (options.normalize) features = l2_normalize(features).values;
    pending.push_back({ts, name, std::move(features)});
  }
  if (pending.empty()) throw ValidationError("no readable images in " + dir.string());

  std::stable_sort(pending.begin(), pending.end(),
                   [](const Pending& a, const Pending& b) { return a.timestamp < b.timestamp; });
  std::vector<FrameDescriptor> frames;
  frames.reserve(pending.size());
  for (std::size_t i = 0; i < pending.size(); ++i) {
    frames.push_back({i, std::move(pending[i].id), pending[i].timestamp, std::move(pending[i].features)});
  }
  auto day_id = std::filesystem::absolute(dir).lexically_normal().filename().string();
  if (day_id.empty()) day_id = std::filesystem::absolute(dir).lexically_normal().parent_path().filename().string();
  return Photostream::create(day_id, std::move(frames));
}

}  // namespace egosum
