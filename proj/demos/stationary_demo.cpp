// Tracks the built-in stationary ellipse for one run and prints how the
// estimate closes in on the truth.

#include <cstdio>

#include "memekf/filter.hpp"
#include "memekf/metrics.hpp"
#include "memekf/scenarios.hpp"
#include "memekf/simulator.hpp"

int main() {
  using namespace memekf;

  const ScenarioSpec spec = stationary_iv_a();
  const GroundTruth truth = gen_truth(spec);
  const auto batches = gen_measurements(truth, spec.sensor(), spec.seed);

  const FilterConfig cfg = FilterConfig::make(spec.sensor(), spec.dynamics());
  FilterState state{spec.priors.kin, spec.priors.shape, 0};

  std::printf("truth: center (0, 0), alpha %.4f, axes (%.1f, %.1f)\n", spec.alpha0,
              spec.axes(0), spec.axes(1));
  std::printf("%4s %10s %10s %10s %10s %10s\n", "k", "cx", "cy", "alpha", "l1", "l2");
  for (std::size_t k = 0; k < batches.size(); ++k) {
    if (k > 0) state = predict(state, cfg);
    state = update_scan(state, batches[k], cfg);
    if (k % 10 == 0 || k + 1 == batches.size()) {
      std::printf("%4zu %10.4f %10.4f %10.4f %10.4f %10.4f\n", k, state.kin.mean(0),
                  state.kin.mean(1), state.shape.alpha(), state.shape.l1(), state.shape.l2());
    }
  }
  const double err = gw_distance(truth.summary_at(batches.size() - 1),
                                 to_ellipse_summary(state.kin, state.shape));
  std::printf("final Gaussian Wasserstein distance: %.4f m\n", err);
  return 0;
}
