// Poisson matrix completion on a 20x20 rank-2 matrix with 80% of entries seen.
#include <iostream>

#include "plr/plr.hpp"

int main() {
  using namespace plr;

  const FeasibleSet set(200.0, 1.0, 2);
  const Matrix M = gen_exact_low_rank(20, 20, 2, set, 5);
  const auto obs = sample_completion_observations(M, 320.0, 6);
  const CompletionObjective f(obs, set);

  SolverConfig cfg;
  cfg.step_recip = 1e-4;
  cfg.max_iter = 2000;
  cfg.lambda = 0.1;
  const auto r = pmlsvt(f, set, std::nullopt, cfg);

  const Vector s = singular_values(r.X);
  std::cout << "observed " << obs.size() << " of " << M.size() << " entries\n"
            << "RMSE " << std::sqrt(squared_error(M, r.X) / M.size()) << "\n"
            << "leading singular values " << s.head(4).transpose() << "\n";
}
