#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "egosum/datamodel.hpp"

namespace egosum {

/// Interleaved 8-bit raster. `channels` must be 3 (RGB) for histogram extraction.
struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 3;
  std::vector<std::uint8_t> pixels;
};

struct HistogramConfig {
  std::size_t bins_per_channel = 8;

  std::size_t dimension() const noexcept { return 3 * bins_per_channel; }
};

/// Concatenated R, G, B histograms; each channel block sums to 1.
/// Bins split [0, 255] into equal widths, so 255 always lands in the last bin.
std::vector<double> extract_histogram(const RgbImage& image, const HistogramConfig& config = {});

struct NormalizedVector {
  std::vector<double> values;
  bool zero_norm = false;  // input was the zero vector and was returned unchanged
};

NormalizedVector l2_normalize(std::span<const double> v);

/// Copy of `stream` with every feature vector L2-normalized.
Photostream normalize_stream(const Photostream& stream);

/// Reads binary (P6) or ASCII (P3) PPM with maxval 255.
RgbImage read_ppm(const std::filesystem::path& path);

/// Reads PPM natively; other formats need the OpenCV build option.
RgbImage read_image(const std::filesystem::path& path);

enum class TimestampSource { kFilenamePattern, kModificationTime };

/// Finds `YYYYMMDD_HHMMSS` (or `YYYYMMDDHHMMSS`) in the file name, as written by Narrative-style cameras.
Timestamp timestamp_from_filename(const std::string& filename);

struct ExtractOptions {
  HistogramConfig histogram;
  TimestampSource timestamps = TimestampSource::kFilenamePattern;
  bool normalize = false;
};

/// Builds a photostream from every image file in `dir`, ordered by timestamp and then file name.
/// Unreadable images are skipped and reported in `warnings`.
Photostream extract_directory(const std::filesystem::path& dir, const ExtractOptions& options,
                              std::vector<std::string>& warnings);

}  // namespace egosum
