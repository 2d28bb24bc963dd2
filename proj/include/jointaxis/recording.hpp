// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "jointaxis/residuals.hpp"

namespace jointaxis {

/// Time-ordered synchronized samples of both sensors.
struct RecordingPair {
  std::vector<SamplePair> samples;
  double sample_rate = 100.0;  // Hz
  std::map<std::string, std::string> metadata;

  std::size_t size() const noexcept { return samples.size(); }
};

inline constexpr const char* kRecordingHeader =
    "t,gyr1_x,gyr1_y,gyr1_z,acc1_x,acc1_y,acc1_z,gyr2_x,gyr2_y,gyr2_z,acc2_x,acc2_y,acc2_z";

struct ReadOptions {
  double jitter_tolerance = 0.01;  // relative deviation from the median step
};

struct ReadResult {
  RecordingPair recording;
  std::vector<std::string> warnings;
};

/// Parses the recording CSV. Lines starting with '#' before the header are
/// read as "key: value" metadata. Throws ParseError naming the line number.
ReadResult read_recording_csv(std::istream& in, const ReadOptions& options = {});
ReadResult read_recording_csv_file(const std::string& path, const ReadOptions& options = {});

/// Writes the header and one row per sample with round-trip precision.
void write_recording_csv(std::ostream& out, const RecordingPair& recording);
void write_recording_csv_file(const std::string& path, const RecordingPair& recording);

/// Samples with t0 <= t <= t1.
std::vector<SamplePair> select_time_range(std::span<const SamplePair> samples, double t0,
                                          double t1);

/// Centered moving average of width `window` (odd, >= 1) over all channels.
/// Edges use the available part of the window.
RecordingPair moving_average(const RecordingPair& recording, int window);

}  // namespace jointaxis
