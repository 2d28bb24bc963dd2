// SPDX-License-Identifier: Apache-2.0

#include "jointaxis/recording.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "jointaxis/errors.hpp"

namespace jointaxis {

namespace {

constexpr std::size_t kColumns = 13;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_field(std::string_view field, std::size_t line, std::size_t column) {
  field = trim(field);
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(line, "column " + std::to_string(column) + ": '" + std::string(field) +
                               "' is not a number");
  }
  if (!std::isfinite(v)) {
    throw ParseError(line, "column " + std::to_string(column) + ": non-finite value");
  }
  return v;
}

void append_number(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

ReadResult read_recording_csv(std::istream& in, const ReadOptions& options) {
  ReadResult result;
  RecordingPair& rec = result.recording;
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<double> fields;
  fields.reserve(kColumns);

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (!have_header) {
      if (line.front() == '#') {
        const std::string_view body = trim(line.substr(1));
        const auto colon = body.find(':');
        if (colon != std::string_view::npos) {
          rec.metadata[std::string(trim(body.substr(0, colon)))] =
              std::string(trim(body.substr(colon + 1)));
        }
        continue;
      }
      if (line != kRecordingHeader) {
        throw ParseError(line_no, std::string("expected header '") + kRecordingHeader + "'");
      }
      have_header = true;
      continue;
    }

    fields.clear();
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      const std::string_view f =
          line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
      if (fields.size() == kColumns) {
        throw ParseError(line_no, "expected 13 columns, found more");
      }
      fields.push_back(parse_field(f, line_no, fields.size() + 1));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (fields.size() != kColumns) {
      throw ParseError(line_no, "expected 13 columns, found " + std::to_string(fields.size()));
    }
    SamplePair s;
    s.t = fields[0];
    s.gyr1 = {fields[1], fields[2], fields[3]};
    s.acc1 = {fields[4], fields[5], fields[6]};
    s.gyr2 = {fields[7], fields[8], fields[9]};
    s.acc2 = {fields[10], fields[11], fields[12]};
    if (!rec.samples.empty() && !(s.t > rec.samples.back().t)) {
      throw ParseError(line_no, "timestamps must be strictly increasing");
    }
    rec.samples.push_back(s);
  }
  if (!have_header) throw ParseError(line_no, "missing header");

  if (rec.samples.size() >= 2) {
    std::vector<double> dt;
    dt.reserve(rec.samples.size() - 1);
    for (std::size_t k = 1; k < rec.samples.size(); ++k) {
      dt.push_back(rec.samples[k].t - rec.samples[k - 1].t);
    }
    std::vector<double> sorted = dt;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2),
                     sorted.end());
    const double median = sorted[sorted.size() / 2];
    rec.sample_rate = 1.0 / median;
    std::size_t jittered = 0;
    for (double d : dt) {
      if (std::abs(d - median) > options.jitter_tolerance * median) ++jittered;
    }
    if (jittered > 0) {
      result.warnings.push_back(std::to_string(jittered) +
                                " sample intervals deviate more than " +
                                std::to_string(options.jitter_tolerance * 100.0) +
                                "% from the median step");
    }
  }
  return result;
}

ReadResult read_recording_csv_file(const std::string& path, const ReadOptions& options) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  return read_recording_csv(in, options);
}

void write_recording_csv(std::ostream& out, const RecordingPair& recording) {
  std::string buf;
  for (const auto& [key, value] : recording.metadata) {
    buf += "# " + key + ": " + value + "\n";
  }
  buf += kRecordingHeader;
  buf += '\n';
  out << buf;
  for (const SamplePair& s : recording.samples) {
    buf.clear();
    append_number(buf, s.t);
    for (const Vec3* v : {&s.gyr1, &s.acc1, &s.gyr2, &s.acc2}) {
      for (int i = 0; i < 3; ++i) {
        buf += ',';
        append_number(buf, (*v)[i]);
      }
    }
    buf += '\n';
    out << buf;
  }
}

void write_recording_csv_file(const std::string& path, const RecordingPair& recording) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_recording_csv(out, recording);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::vector<SamplePair> select_time_range(std::span<const SamplePair> samples, double t0,
                                          double t1) {
  std::vector<SamplePair> out;
  for (const SamplePair& s : samples) {
    if (s.t >= t0 && s.t <= t1) out.push_back(s);
  }
  return out;
}

RecordingPair moving_average(const RecordingPair& recording, int window) {
  if (window < 1 || window % 2 == 0) {
    throw ArgumentError("moving_average: window must be odd and >= 1");
  }
  RecordingPair out = recording;
  if (window == 1) return out;
  const auto n = static_cast<long>(recording.samples.size());
  const long half = window / 2;
  for (long k = 0; k < n; ++k) {
    const long lo = std::max(0L, k - half);
    const long hi = std::min(n - 1, k + half);
    SamplePair acc;
    for (long i = lo; i <= hi; ++i) {
      const SamplePair& s = recording.samples[static_cast<std::size_t>(i)];
      acc.gyr1 += s.gyr1;
      acc.acc1 += s.acc1;
      acc.gyr2 += s.gyr2;
      acc.acc2 += s.acc2;
    }
    const double m = static_cast<double>(hi - lo + 1);
    SamplePair& o = out.samples[static_cast<std::size_t>(k)];
    o.gyr1 = acc.gyr1 / m;
    o.acc1 = acc.acc1 / m;
    o.gyr2 = acc.gyr2 / m;
    o.acc2 = acc.acc2 / m;
  }
  return out;
}

}  // namespace jointaxis
