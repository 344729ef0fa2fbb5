#include "thermoisaacs/relay.hpp"

#include <algorithm>
#include <cmath>

#include "thermoisaacs/errors.hpp"
#include "thermoisaacs/util.hpp"

namespace thermoisaacs {

bool relay_pair_admissible(double value, int output, const RelayConfig& cfg) {
  return output == -1 ? value <= cfg.hi : value >= cfg.lo;
}

std::optional<double> relay_segment_crossing(int output, double va, double vb,
                                             const RelayConfig& cfg,
                                             double cross_tol) {
  if (output == -1) {
    // Waiting for a strict upward bypass of the high threshold. While the
    // output is -1 the invariant keeps va <= hi, so a segment ending strictly
    // beyond hi crosses it exactly once.
    if (!(vb > cfg.hi + cross_tol)) return std::nullopt;
    if (va >= cfg.hi) return 0.0;  // entered sitting on the threshold
    return (cfg.hi - va) / (vb - va);
  }
  if (!(vb < cfg.lo - cross_tol)) return std::nullopt;
  if (va <= cfg.lo) return 0.0;
  return (cfg.lo - va) / (vb - va);
}

static void check_signal(const SampledSignal& s) {
  if (s.times.empty() || s.times.size() != s.values.size())
    throw InvalidArgument("signal needs matching, nonempty times/values");
  if (s.times[0] != 0.0) throw InvalidArgument("signal must start at t = 0");
  for (std::size_t k = 1; k < s.times.size(); ++k)
    if (!(s.times[k] > s.times[k - 1]))
      throw InvalidArgument("signal times must be strictly increasing");
  for (double v : s.values)
    if (!std::isfinite(v)) throw InvalidArgument("signal values must be finite");
}

RelayTrace relay_evaluate(const SampledSignal& signal, const RelayConfig& cfg,
                          int initial_output, double cross_tol) {
  if (!(cfg.lo < cfg.hi)) throw InvalidArgument("relay requires lo < hi");
  if (initial_output != -1 && initial_output != 1)
    throw InvalidArgument("relay output must be -1 or +1");
  check_signal(signal);
  if (!relay_pair_admissible(signal.values[0], initial_output, cfg))
    throw InadmissibleInitialPair("(" + format_double(signal.values[0]) + ", " +
                                  std::to_string(initial_output) +
                                  ") is not an admissible relay pair");

  RelayTrace trace;
  trace.initial_output = initial_output;
  int w = initial_output;
  for (std::size_t k = 0; k + 1 < signal.times.size(); ++k) {
    const double ta = signal.times[k], tb = signal.times[k + 1];
    auto frac = relay_segment_crossing(w, signal.values[k], signal.values[k + 1],
                                       cfg, cross_tol);
    if (!frac) continue;
    // A linear segment is monotone, so after this flip no further crossing can
    // happen before tb.
    trace.switch_times.push_back(ta + *frac * (tb - ta));
    w = -w;
  }
  return trace;
}

int relay_output_at(const RelayTrace& trace, double t) {
  // Left-continuous: a switch at exactly t has not taken effect yet.
  auto n = std::lower_bound(trace.switch_times.begin(), trace.switch_times.end(), t) -
           trace.switch_times.begin();
  return (n % 2 == 0) ? trace.initial_output : -trace.initial_output;
}

int relay_variation(const RelayTrace& trace, double t) {
  auto n = std::upper_bound(trace.switch_times.begin(), trace.switch_times.end(), t) -
           trace.switch_times.begin();
  return int(2 * n);
}

}  // namespace thermoisaacs
