// Compressive recovery of a small synthetic nearly-low-rank intensity field.
#include <iostream>

#include "plr/plr.hpp"

int main() {
  using namespace plr;

  WeakLqSpec spec;
  spec.rows = 16;
  spec.cols = 12;
  spec.q = 0.5;
  spec.total_intensity = 1e5;
  spec.entry_floor = 1.0;
  const Matrix M = gen_weak_lq(spec, 11).M;

  const auto ensemble = build_sensing_ensemble(16, 12, 400, 0.5, 12);
  const auto y = sample_compressive_counts(ensemble, M, 13);

  const FeasibleSet set(spec.total_intensity, 1e-3 / 400.0, 3, spec.total_intensity, 1e-3);
  SolverConfig cfg;
  cfg.step_recip = 1e-5;
  cfg.max_iter = 2500;
  cfg.lambda = 0.02;

  const RecoveryObjective f(ensemble, y, set);
  const Matrix X0 = recovery_init(ensemble, y, spec.total_intensity);
  const auto r = pmlsvt(f, set, std::nullopt, cfg);

  const double I2 = spec.total_intensity * spec.total_intensity;
  std::cout << "init   R/I^2 = " << squared_error(M, X0) / I2 << "\n"
            << "pmlsvt R/I^2 = " << squared_error(M, r.X) / I2 << " after "
            << r.trace.iterations_run << " iterations ("
            << to_string(r.trace.terminated_by) << ")\n";
}
