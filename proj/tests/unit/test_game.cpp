#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "resparse/error.hpp"
#include "resparse/game.hpp"
#include "resparse/graph.hpp"

using namespace resparse;

namespace {

std::vector<Row> k8_rows() { return graph_rows(generate(GraphFamily::complete, 8, 0)); }

// Basis rows e_0..e_{n-1}: M = I and every leverage is 1.
std::vector<Row> basis_rows(std::size_t n) {
  std::vector<Row> rows;
  for (std::size_t i = 0; i < n; ++i) rows.emplace_back(n, std::vector<RowEntry>{{i, 1.0}});
  return rows;
}

GameConfig config_with_alpha(double alpha, RandomnessMode mode = RandomnessMode::coupled) {
  GameConfig c;
  c.epsilon = 0.4;
  c.alpha = alpha;
  c.mode = mode;
  return c;
}

double min_eigenvalue(const DenseMatrix& m) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("new game on K8 rows") {
  // max leverage 2/8 needs alpha <= 4
  GameConfig c;
  c.epsilon = 0.4;
  c.c_alpha = 4.0 * 0.16 / std::log(8.0);
  Game g(k8_rows(), c, 1);
  CHECK(g.alpha() == doctest::Approx(4.0));
  CHECK(g.num_rows() == 28);
  CHECK((g.current() - g.reference()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((g.reference() - oracle::laplacian(generate(GraphFamily::complete, 8, 0))).cwiseAbs().maxCoeff() <= 1e-12);
  for (std::size_t i = 0; i < g.num_rows(); ++i) {
    CHECK(g.weight(i) == 1.0);
    CHECK(g.leverage(i) == doctest::Approx(0.25).epsilon(1e-12));
  }
  CHECK(g.check_win() == Verdict::not_yet);
  CHECK(g.last_epsilon() <= 1e-10);
}

TEST_CASE("tree rows are rejected with their indices") {
  const auto rows = graph_rows(generate(GraphFamily::path, 5, 0));
  GameConfig c;
  c.epsilon = 0.4;
  try {
    Game g(rows, c, 0);
    FAIL("expected rejection");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("0") != std::string::npos);
    CHECK(msg.find("3") != std::string::npos);
  }
  // the exclude policy keeps them out of play instead
  c.high_leverage = HighLeveragePolicy::exclude;
  Game g(rows, c, 0);
  for (std::size_t i = 0; i < 4; ++i) CHECK_FALSE(g.playable(i));
  CHECK_FALSE(g.legal_move(0, 1.0));
}

TEST_CASE("epsilon range") {
  GameConfig c = config_with_alpha(1.0);
  c.epsilon = 0.0;
  CHECK_THROWS_AS(Game(basis_rows(3), c, 0), InputError);
  c.epsilon = 0.6;
  CHECK_THROWS_AS(Game(basis_rows(3), c, 0), InputError);
  c.epsilon = 0.5;
  CHECK_NOTHROW(Game(basis_rows(3), c, 0));
}

TEST_CASE("fresh and coupled agree on a p = 1 move") {
  Game a(k8_rows(), config_with_alpha(4.0, RandomnessMode::coupled), 9);
  Game b(k8_rows(), config_with_alpha(4.0, RandomnessMode::fresh), 9);
  CHECK(a.play_move(3, 1.0));
  CHECK(b.play_move(3, 1.0));
  for (std::size_t i = 0; i < a.num_rows(); ++i) CHECK(a.weight(i) == b.weight(i));
}

TEST_CASE("legal_move examples") {
  Game g(k8_rows(), config_with_alpha(2.0), 0);
  CHECK(g.legal_move(0, 1.0));
  const double tight = g.leverage(0) * g.alpha() * g.weight(0);
  CHECK(g.legal_move(0, tight));
  CHECK_FALSE(g.legal_move(0, tight * 0.99));
  CHECK(g.min_legal_p(0) == doctest::Approx(tight));
  CHECK_FALSE(g.legal_move(0, 0.0));
  CHECK_FALSE(g.legal_move(0, 1.5));

  // zero weight
  g.play_move_with_outcome(0, 0.6, false);
  CHECK(g.weight(0) == 0.0);
  CHECK_FALSE(g.legal_move(0, 1.0));
  CHECK(std::isinf(g.min_legal_p(0)));
}

TEST_CASE("illegal move leaves the state unchanged") {
  Game g(k8_rows(), config_with_alpha(2.0), 0);
  const DenseMatrix before = g.current();
  CHECK_THROWS_AS(g.play_move(1, 0.1), ContractViolation);
  CHECK_THROWS_AS(g.play_move_with_outcome(1, 0.1, true), ContractViolation);
  CHECK(g.move_count() == 0);
  CHECK(g.weight(1) == 1.0);
  CHECK(g.current() == before);
}

TEST_CASE("play_move examples") {
  Game g(k8_rows(), config_with_alpha(2.0), 4);
  CHECK(g.play_move(2, 1.0));
  CHECK(g.weight(2) == 1.0);

  // forced keep
  g.set_coupling_draw(5, std::numeric_limits<double>::infinity());
  CHECK(g.play_move(5, 0.8));
  CHECK(g.weight(5) == doctest::Approx(1.25));
  // forced drop
  g.set_coupling_draw(6, -std::numeric_limits<double>::infinity());
  CHECK_FALSE(g.play_move(6, 0.8));
  CHECK(g.weight(6) == 0.0);
  CHECK(g.current_consistency_error() <= 1e-10);
}

TEST_CASE("keep rate at p = 0.7") {
  for (RandomnessMode mode : {RandomnessMode::coupled, RandomnessMode::fresh}) {
    const Game base(k8_rows(), config_with_alpha(2.0, mode), 0);
    int kept = 0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
      Game g = base;
      g.reseed(derive_seed(77, static_cast<std::uint64_t>(t)));
      kept += g.play_move(0, 0.7) ? 1 : 0;
    }
    const double rate = static_cast<double>(kept) / trials;
    CHECK(rate >= 0.68);
    CHECK(rate <= 0.72);
  }
}

TEST_CASE("martingale property of one move") {
  // state after a few moves, then replay a single legal move
  auto make_base = [](RandomnessMode mode) {
    Game g(k8_rows(), config_with_alpha(2.0, mode), 3);
    if (mode == RandomnessMode::coupled) {
      g.set_coupling_draw(0, 10.0);
      g.set_coupling_draw(1, 10.0);
    }
    g.play_move_with_outcome(0, 0.9, true);
    g.play_move_with_outcome(1, 0.8, true);
    return g;
  };
  const std::size_t row = 1;

  for (RandomnessMode mode : {RandomnessMode::coupled, RandomnessMode::fresh}) {
    const Game base = make_base(mode);
    const double p = base.min_legal_p(row) * 1.05;
    REQUIRE(base.legal_move(row, p));
    REQUIRE(p < 1.0);
    const int trials = 10000;
    const auto n = static_cast<Eigen::Index>(base.dimension());
    DenseMatrix sum = DenseMatrix::Zero(n, n);
    DenseMatrix sq = DenseMatrix::Zero(n, n);
    for (int t = 0; t < trials; ++t) {
      Game g = base;
      g.reseed(derive_seed(1234, static_cast<std::uint64_t>(t)));
      g.play_move(row, p);
      sum += g.current();
      sq += g.current().cwiseProduct(g.current());
    }
    const DenseMatrix mean = sum / trials;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double var = sq(i, j) / trials - mean(i, j) * mean(i, j);
        const double se = std::sqrt(std::max(0.0, var) / trials);
        const double diff = std::abs(mean(i, j) - base.current()(i, j));
        if (se < 1e-12) {
          CHECK(diff <= 1e-9);
        } else {
          CHECK(diff <= 3.0 * se);
        }
      }
    }
  }
}

TEST_CASE("difference norm and quadratic variation") {
  SUBCASE("empty trace") {
    Game g(basis_rows(4), config_with_alpha(0.5), 0);
    CHECK(g.quadratic_variation_norm() == 0.0);
  }
  SUBCASE("single move with M = I") {
    Game g(basis_rows(4), config_with_alpha(0.5), 0);
    g.play_move_with_outcome(2, 0.5, true);
    // ((1-p)/p) (a^T a)^2 = 1
    CHECK(g.quadratic_variation_norm() == doctest::Approx(1.0));
    CHECK(g.trace().moves[0].norm_x == doctest::Approx(1.0));
  }
  SUBCASE("single move, p = 0.8, dropped") {
    Game g(basis_rows(4), config_with_alpha(0.5), 0);
    g.play_move_with_outcome(1, 0.8, false);
    CHECK(g.quadratic_variation_norm() == doctest::Approx(0.25));
    CHECK(g.trace().moves[0].norm_x == doctest::Approx(1.0));
  }
}

TEST_CASE("random legal play keeps every invariant") {
  const double alpha = 2.0;
  GameConfig c = config_with_alpha(alpha);
  c.verify_cache = true;
  c.check = WinCheck::every_move;
  Game g(k8_rows(), c, 21);
  const auto strategy = uniform_random_legal(5);
  DenseMatrix prev = g.trace().variation;
  for (int step = 0; step < 60; ++step) {
    const auto move = strategy(g);
    if (!move) break;
    REQUIRE(g.legal_move(move->row, move->p));
    g.play_move(move->row, move->p);
    const MoveRecord& rec = g.trace().moves.back();
    CHECK(rec.norm_x <= (1.0 + 1e-9) / alpha);
    const double expect = rec.kept ? (1.0 - rec.p) / rec.p * rec.weight_before * g.leverage(rec.row)
                                   : rec.weight_before * g.leverage(rec.row);
    CHECK(rec.norm_x == doctest::Approx(expect));
    for (std::size_t i = 0; i < g.num_rows(); ++i) CHECK(g.weight(i) <= g.weight_cap(i) * (1 + 1e-12));
    const DenseMatrix& w = g.trace().variation;
    CHECK(min_eigenvalue(w) >= -1e-12);
    CHECK(min_eigenvalue(w - prev) >= -1e-12);
    prev = w;
    CHECK(g.current_consistency_error() <= 1e-10);
    CHECK(rec.epsilon_star.has_value());
  }
}

TEST_CASE("strict mode forbids p below one half") {
  GameConfig c = config_with_alpha(0.5);
  c.strict = true;
  Game g(basis_rows(3), c, 0);
  CHECK_FALSE(g.legal_move(0, 0.49));
  CHECK(g.legal_move(0, 0.5));
}

TEST_CASE("check_win") {
  SUBCASE("zero all weights") {
    Game g(k8_rows(), config_with_alpha(2.0), 0);
    for (std::size_t i = 0; i < g.num_rows(); ++i) g.play_move_with_outcome(i, 1.0, false);
    CHECK(g.check_win() == Verdict::adversary_won);
    CHECK(g.adversary_has_won());
    CHECK(g.last_epsilon() == doctest::Approx(1.0));
  }
  SUBCASE("halving on split K8 rows") {
    const double eps = 0.4;
    const double alpha = game_alpha(8, eps, 8.0);
    const auto base = k8_rows();
    const auto rows = split_for_game(8, base, alpha, 3);
    int not_yet = 0;
    int within = 0;
    for (int seed = 0; seed < 100; ++seed) {
      GameConfig c;
      c.epsilon = eps;
      c.check = WinCheck::at_end;
      c.strict = true;
      Game g(rows, c, static_cast<Seed>(seed));
      const GameResult r = run_strategy(g, halving_schedule(), 1000000);
      if (r.verdict == Verdict::not_yet) ++not_yet;
      if (r.final_norm_w <= 16.0 / alpha) ++within;
      CHECK_FALSE(r.hit_move_cap);
    }
    CHECK(not_yet >= 95);
    CHECK(within >= 95);
  }
}

TEST_CASE("split_rows") {
  const auto rows = k8_rows();
  std::vector<std::size_t> copies(rows.size(), 1);
  copies[0] = 4;
  const auto split = split_rows(rows, copies);
  CHECK(split.size() == rows.size() + 3);
  CHECK((gram(8, split) - gram(8, rows)).cwiseAbs().maxCoeff() <= 1e-12);
  REQUIRE(split[0].edge());
  CHECK(split[0].edge()->w == doctest::Approx(0.25));
  copies[1] = 0;
  CHECK_THROWS_AS(split_rows(rows, copies), InputError);

  const double alpha = game_alpha(8, 0.4, 8.0);
  const auto game_rows = split_for_game(8, rows, alpha, 3);
  GameConfig c;
  c.epsilon = 0.4;
  Game g(game_rows, c, 0);
  for (std::size_t i = 0; i < g.num_rows(); ++i) {
    CHECK(g.leverage(i) * alpha * 8.0 <= 1.0 + 1e-12);
  }
}

TEST_CASE("run_strategy rejects an illegal strategy") {
  Game g(k8_rows(), config_with_alpha(2.0), 0);
  AdversaryStrategy bad = [](const Game&) { return std::optional<Move>(Move{0, 0.01}); };
  CHECK_THROWS_AS(run_strategy(g, bad, 10), ContractViolation);
  CHECK(g.move_count() == 0);
}

TEST_CASE("run_strategy stops at the move cap and when the strategy is done") {
  Game g(k8_rows(), config_with_alpha(2.0), 0);
  const GameResult capped = run_strategy(g, halving_schedule(), 5);
  CHECK(capped.moves == 5);
  CHECK(capped.hit_move_cap);

  Game h(k8_rows(), config_with_alpha(2.0), 0);
  AdversaryStrategy none = [](const Game&) { return std::optional<Move>{}; };
  const GameResult r = run_strategy(h, none, 5);
  CHECK(r.moves == 0);
  CHECK(r.verdict == Verdict::not_yet);
}

TEST_CASE("win checks every k moves") {
  GameConfig c = config_with_alpha(2.0);
  c.check = WinCheck::every_k;
  c.check_every = 3;
  Game g(k8_rows(), c, 0);
  run_strategy(g, halving_schedule(), 7);
  const auto& moves = g.trace().moves;
  REQUIRE(moves.size() == 7);
  CHECK_FALSE(moves[0].epsilon_star.has_value());
  CHECK(moves[2].epsilon_star.has_value());
  CHECK(moves[5].epsilon_star.has_value());
  // the final check always runs
  CHECK(moves[6].epsilon_star.has_value());
}

TEST_CASE("trace csv") {
  Game g(basis_rows(3), config_with_alpha(0.5), 0);
  g.play_move_with_outcome(0, 0.5, true);
  g.check_win();
  std::ostringstream out;
  write_trace_csv(out, g.trace());
  const std::string csv = out.str();
  CHECK(csv.rfind("move,i,p,kept,norm_X,norm_W,epsilon_star\n", 0) == 0);
  CHECK(csv.find("1,0,0.5") != std::string::npos);
}

TEST_CASE("determinism") {
  auto run = [](Seed seed) {
    Game g(k8_rows(), config_with_alpha(2.0), seed);
    run_strategy(g, uniform_random_legal(seed), 40);
    return std::vector<double>(g.weights().begin(), g.weights().end());
  };
  CHECK(run(5) == run(5));
  CHECK(run(5) != run(6));
}
