#pragma once

#include <cstddef>
#include <optional>

#include "resparse/game.hpp"
#include "resparse/parallel.hpp"
#include "resparse/streaming.hpp"

namespace resparse {

// Every hidden constant in one place.
struct Constants {
  double beta_coeff = 200.0;
  double buffer_coeff = 20.0;
  double alpha_coeff = 100.0;
  double stop_coeff = 100.0;
  double estimate_ratio = 10.0;
  double c0 = 4.0;
  double c_k = 3.0;
  double c_alpha = 8.0;
  std::optional<std::size_t> t_override;
};

inline Constants default_constants() { return Constants{}; }

// Small enough that resparsification and the ParallelSparsify loop actually
// run on graphs with a few hundred vertices.
inline Constants desk_constants() {
  Constants c;
  c.beta_coeff = 8.0;
  c.buffer_coeff = 4.0;
  c.alpha_coeff = 2.0;
  c.stop_coeff = 0.05;
  c.estimate_ratio = 1.25;
  c.c_k = 0.02;
  return c;
}

inline StreamConfig stream_config(const Constants& c, double epsilon, Seed seed) {
  StreamConfig s;
  s.epsilon = epsilon;
  s.beta_coeff = c.beta_coeff;
  s.buffer_coeff = c.buffer_coeff;
  s.seed = seed;
  return s;
}

inline ParallelConfig parallel_config(const Constants& c, double epsilon, Seed seed) {
  ParallelConfig p;
  p.epsilon = epsilon;
  p.alpha_coeff = c.alpha_coeff;
  p.stop_coeff = c.stop_coeff;
  p.estimate_ratio = c.estimate_ratio;
  p.c_k = c.c_k;
  p.spanner.c0 = c.c0;
  p.spanner.t_override = c.t_override;
  p.seed = seed;
  return p;
}

inline GameConfig game_config(const Constants& c, double epsilon) {
  GameConfig g;
  g.epsilon = epsilon;
  g.c_alpha = c.c_alpha;
  return g;
}

}  // namespace resparse
