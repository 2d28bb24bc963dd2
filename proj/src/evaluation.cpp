// SPDX-License-Identifier: Apache-2.0

#include "jointaxis/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "jointaxis/errors.hpp"

namespace jointaxis {

namespace {

void require_unit(const Vec3& v, const char* what) {
  const double n = v.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-6) {
    throw NormViolation(std::string(what) + ": expected a unit vector, norm is " +
                        std::to_string(n));
  }
}

AxisMetrics summarize(std::span<const Vec3> estimates, std::span<const double> errors) {
  AxisMetrics m;
  if (estimates.size() >= 2) {
    const MadSad ms = mad_sad(estimates);
    m.mad = ms.mad;
    m.sad = ms.sad;
  }
  if (!errors.empty()) {
    double sum = 0.0;
    for (double e : errors) sum += e;
    m.mean_error = sum / static_cast<double>(errors.size());
    double var = 0.0;
    for (double e : errors) var += (e - m.mean_error) * (e - m.mean_error);
    m.std_error = errors.size() > 1 ? std::sqrt(var / static_cast<double>(errors.size() - 1)) : 0.0;
  }
  return m;
}

}  // namespace

std::string_view to_string(MethodSpec method) {
  switch (method) {
    case MethodSpec::gyro_only: return "gyro_only";
    case MethodSpec::acc_only: return "acc_only";
    case MethodSpec::combined_unweighted: return "combined_unweighted";
    case MethodSpec::combined_weighted: return "combined_weighted";
  }
  return "combined_weighted";
}

MethodSpec parse_method(std::string_view s) {
  for (MethodSpec m : kAllMethods) {
    if (s == to_string(m)) return m;
  }
  if (s == "weighted") return MethodSpec::combined_weighted;
  if (s == "unweighted") return MethodSpec::combined_unweighted;
  throw ConfigError("unknown method '" + std::string(s) + "'");
}

ResidualWeights weights_for(MethodSpec method, const NoiseModel& noise) {
  switch (method) {
    case MethodSpec::gyro_only:
      return {1.0, AccWeighting::constant, 0.0};
    case MethodSpec::acc_only:
      return {0.0, AccWeighting::constant, 1.0};
    case MethodSpec::combined_unweighted:
      return {1.0, AccWeighting::constant, 1.0};
    case MethodSpec::combined_weighted:
      break;
  }
  return {base_weight(noise), AccWeighting::norm_difference, 1.0};
}

double angular_deviation(const Vec3& a, const Vec3& b) {
  require_unit(a, "angular_deviation");
  require_unit(b, "angular_deviation");
  // Same angle as acos of the dot product, but accurate near 0 and 180 degrees.
  return rad2deg(std::atan2(a.cross(b).norm(), a.dot(b)));
}

MadSad mad_sad(std::span<const Vec3> estimates) {
  const std::size_t m = estimates.size();
  if (m < 2) throw ArgumentError("mad_sad: need at least 2 estimates");
  std::vector<double> ad;
  ad.reserve(m * (m - 1) / 2);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) ad.push_back(angular_deviation(estimates[a], estimates[b]));
  }
  MadSad out;
  double sum = 0.0;
  for (double v : ad) sum += v;
  out.mad = sum / static_cast<double>(ad.size());
  if (ad.size() > 1) {
    double var = 0.0;
    for (double v : ad) var += (v - out.mad) * (v - out.mad);
    out.sad = std::sqrt(var / static_cast<double>(ad.size() - 1));
  }
  return out;
}

AxisPair resolve_sign(const AxisPair& estimate, const Vec3& reference_j1) {
  if (angular_deviation(-estimate.j1, reference_j1) < angular_deviation(estimate.j1, reference_j1)) {
    return {-estimate.j1, -estimate.j2};
  }
  return estimate;
}

std::vector<SegmentWindow> segment_dataset(std::size_t length, std::size_t segments,
                                           std::size_t window) {
  if (segments < 1) throw ArgumentError("segment_dataset: need at least one segment");
  if (window < 1) throw ArgumentError("segment_dataset: window must be >= 1");
  if (length < window) {
    throw ArgumentError("segment_dataset: recording has " + std::to_string(length) +
                        " samples, fewer than the window of " + std::to_string(window));
  }
  std::vector<SegmentWindow> out;
  out.reserve(segments);
  const std::size_t span = length - window;
  for (std::size_t m = 0; m < segments; ++m) {
    const std::size_t start = segments == 1 ? 0 : (m * span) / (segments - 1);
    out.push_back({start, window});
  }
  return out;
}

bool windows_overlap(std::span<const SegmentWindow> windows) {
  for (std::size_t k = 1; k < windows.size(); ++k) {
    if (windows[k].start < windows[k - 1].start + windows[k - 1].count) return true;
  }
  return false;
}

const MethodReport& EvaluationReport::method(MethodSpec m) const {
  for (const MethodReport& r : methods) {
    if (r.method == m) return r;
  }
  throw ArgumentError("report has no entry for method " + std::string(to_string(m)));
}

EvaluationReport run_evaluation(const RecordingPair& recording, const AxisPair& reference,
                                const EvaluationOptions& options) {
  require_unit(reference.j1, "reference j1");
  require_unit(reference.j2, "reference j2");
  if (options.methods.empty()) throw ArgumentError("run_evaluation: no methods selected");
  options.solver.validate();

  const auto windows = segment_dataset(recording.size(), options.segments, options.window);

  EvaluationReport report;
  report.segment_count = options.segments;
  report.window = options.window;
  report.seed = options.seed;
  report.noise = options.noise;
  report.reference = reference;
  if (windows_overlap(windows)) {
    report.warnings.emplace_back("segments overlap: recording is shorter than segments x window");
  }

  std::vector<ResidualWeights> weights;
  for (MethodSpec m : options.methods) weights.push_back(weights_for(m, options.noise));

  const std::size_t n_methods = options.methods.size();
  const std::size_t n_segments = windows.size();
  std::vector<SegmentEstimate> slots(n_methods * n_segments);

  const std::span<const SamplePair> all(recording.samples);
  auto solve_segment = [&](std::size_t seg) {
    const SegmentWindow& w = windows[seg];
    const auto data = all.subspan(w.start, w.count);
    const AxisParams x0 = random_initialization(derive_seed(options.seed, seg));
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      const EstimationResult r = estimate_axes(data, weights[mi], options.solver, x0);
      SegmentEstimate& e = slots[mi * n_segments + seg];
      e.start = w.start;
      e.axes = resolve_sign(r.axes, reference.j1);
      e.cost = r.final_cost;
      e.iterations = r.iterations;
      e.converged = r.converged;
      e.error_j1 = angular_deviation(e.axes.j1, reference.j1);
      e.error_j2 = angular_deviation(e.axes.j2, reference.j2);
    }
  };

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(n_segments));
  if (threads == 1) {
    for (std::size_t seg = 0; seg < n_segments; ++seg) solve_segment(seg);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) {
      pool.emplace_back([&] {
        for (std::size_t seg = next++; seg < n_segments; seg = next++) solve_segment(seg);
      });
    }
  }

  for (std::size_t mi = 0; mi < n_methods; ++mi) {
    MethodReport mr;
    mr.method = options.methods[mi];
    mr.segments.assign(slots.begin() + static_cast<long>(mi * n_segments),
                       slots.begin() + static_cast<long>((mi + 1) * n_segments));
    std::vector<Vec3> j1s, j2s;
    std::vector<double> e1, e2;
    for (const SegmentEstimate& e : mr.segments) {
      j1s.push_back(e.axes.j1);
      j2s.push_back(e.axes.j2);
      e1.push_back(e.error_j1);
      e2.push_back(e.error_j2);
      if (e.error_j2 < 90.0) ++mr.correct_pairing;
      if (!e.converged) ++mr.non_converged;
    }
    mr.j1 = summarize(j1s, e1);
    mr.j2 = summarize(j2s, e2);
    report.methods.push_back(std::move(mr));
  }
  return report;
}

}  // namespace jointaxis
