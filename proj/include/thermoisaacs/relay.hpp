#pragma once

#include <optional>
#include <vector>

namespace thermoisaacs {

/// Threshold band of a delayed relay. Requires lo < hi.
struct RelayConfig {
  double lo = -0.5;
  double hi = 0.5;
};

/// Piecewise-linear scalar signal. `times` starts at 0 and is strictly
/// increasing; `values` has the same length.
struct SampledSignal {
  std::vector<double> times;
  std::vector<double> values;
};

/// Left-continuous relay output: `initial_output` up to and including the
/// first switch time, flipping sign once per switch. switch_times is sorted.
struct RelayTrace {
  int initial_output = -1;
  std::vector<double> switch_times;
};

/// (value, output) admissibility: output -1 requires value <= hi, output +1
/// requires value >= lo.
bool relay_pair_admissible(double value, int output, const RelayConfig& cfg);

/// Crossing test for one linear segment va -> vb entered with `output` held.
/// Returns the fraction in [0, 1) of the segment at which the input meets the
/// threshold it is about to bypass, or nullopt when the segment does not end
/// strictly beyond that threshold. A sample exactly on the threshold does not
/// trigger by itself; the segment must leave it behind. cross_tol widens the
/// "strictly beyond" test for robustness experiments.
std::optional<double> relay_segment_crossing(int output, double va, double vb,
                                             const RelayConfig& cfg,
                                             double cross_tol = 0.0);

/// Full evolution of the delayed relay over a sampled signal.
/// Throws InadmissibleInitialPair when (values[0], initial_output) is outside
/// the admissible set, InvalidArgument on malformed signals or lo >= hi.
RelayTrace relay_evaluate(const SampledSignal& signal, const RelayConfig& cfg,
                          int initial_output, double cross_tol = 0.0);

/// Output at time t >= 0. Left-continuous: at a switch time the pre-switch
/// value is returned.
int relay_output_at(const RelayTrace& trace, double t);

/// Total variation of the output on [0, t]: twice the number of switches with
/// switch time <= t.
int relay_variation(const RelayTrace& trace, double t);

}  // namespace thermoisaacs
