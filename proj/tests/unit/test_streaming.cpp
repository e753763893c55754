#include <doctest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "replay.hpp"
#include "resparse/error.hpp"
#include "resparse/leverage.hpp"
#include "resparse/presets.hpp"
#include "resparse/streaming.hpp"

using namespace resparse;

namespace {

std::vector<Row> repeated(const WeightedGraph& g, std::size_t copies) {
  std::vector<Row> rows;
  for (std::size_t c = 0; c < copies; ++c) {
    for (const Edge& e : g.edges()) rows.push_back(Row::from_edge(g.num_vertices(), e));
  }
  return rows;
}

StreamConfig small_config(double beta_coeff, double buffer_coeff, Seed seed = 0) {
  StreamConfig c;
  c.epsilon = 0.5;
  c.beta_coeff = beta_coeff;
  c.buffer_coeff = buffer_coeff;
  c.seed = seed;
  c.leverage_mode = LeverageMode::exact;
  return c;
}

SparsifierBuffer buffer_of(const std::vector<Row>& rows) {
  SparsifierBuffer b(rows.front().dimension());
  for (std::size_t i = 0; i < rows.size(); ++i) b.append(i, rows[i]);
  return b;
}

class WrongDimensionStream final : public RowStream {
 public:
  std::size_t dimension() const override { return 3; }

 protected:
  std::optional<Row> produce() override {
    if (count_++ == 0) return Row(3, {{0, 1.0}, {1, -1.0}});
    if (count_ == 2) return Row(4, {{0, 1.0}, {3, -1.0}});
    return std::nullopt;
  }

 private:
  int count_ = 0;
};

}  // namespace

TEST_CASE("beta and threshold") {
  CHECK(stream_beta(100, 0.5, 8.0) == doctest::Approx(8.0 * std::log(100.0) / 0.25));
  CHECK(stream_beta(1, 0.5, 1.0) == doctest::Approx(std::log(2.0) * 4.0));
  CHECK(stream_threshold(60, 0.5, 8.0, 4.0) == doctest::Approx(4.0 * 60 * stream_beta(60, 0.5, 8.0)));
}

TEST_CASE("config validation") {
  const WeightedGraph g = generate(GraphFamily::cycle, 5, 0);
  auto run = [&](StreamConfig c) {
    GraphRowStream s(g);
    return stream_sparsify_graph(s, c);
  };
  StreamConfig c = small_config(1, 1);
  c.epsilon = 0.0;
  CHECK_THROWS_AS(run(c), InputError);
  c.epsilon = 0.7;
  CHECK_THROWS_AS(run(c), InputError);
  c = small_config(0, 1);
  CHECK_THROWS_AS(run(c), InputError);
  c = small_config(1, 1);
  c.leverage_mode = LeverageMode::sketched;
  c.delta_jl = 0.5;
  CHECK_THROWS_AS(run(c), InputError);
}

TEST_CASE("below threshold the stream is copied") {
  const WeightedGraph g = generate(GraphFamily::gnp, 40, 3, 0.3);
  GraphRowStream s(g);
  const StreamGraphResult r = stream_sparsify_graph(s, stream_config(desk_constants(), 0.5, 1));
  CHECK(r.stats.rounds.empty());
  CHECK(r.graph == g);
  CHECK(r.stats.rows_consumed == g.num_edges());
  CHECK(s.delivered() == g.num_edges());
  CHECK(s.exhausted());
}

TEST_CASE("tree survives resparsification unchanged") {
  const WeightedGraph tree = generate(GraphFamily::star, 50, 0);
  const double beta = stream_beta(50, 0.5, 1.0);
  REQUIRE(beta >= 1.0);
  // threshold 47.5: rounds fire on rows 48 and 49 and keep everything
  StreamConfig c = small_config(1.0, 47.5 / (50 * beta));
  GraphRowStream s(tree);
  const StreamGraphResult r = stream_sparsify_graph(s, c);
  CHECK(r.stats.rounds.size() == 2);
  CHECK(r.graph == tree);

  // three stalled rounds in a row
  StreamConfig stall = small_config(1.0, 45.5 / (50 * beta));
  GraphRowStream s2(tree);
  CHECK_THROWS_AS(stream_sparsify_graph(s2, stall), SolverError);
}

TEST_CASE("bridge is always kept") {
  // two K5 joined by edge (4, 5), clique edges streamed 20 times around it
  std::vector<Edge> clique;
  for (Vertex u = 0; u < 5; ++u) {
    for (Vertex v = u + 1; v < 5; ++v) {
      clique.push_back({u, v, 1.0});
      clique.push_back({static_cast<Vertex>(u + 5), static_cast<Vertex>(v + 5), 1.0});
    }
  }
  std::vector<Edge> stream;
  for (int rep = 0; rep < 20; ++rep) {
    if (rep == 10) stream.push_back({4, 5, 1.0});
    stream.insert(stream.end(), clique.begin(), clique.end());
  }
  const WeightedGraph g(10, stream);
  const std::size_t bridge_source = 10 * clique.size();
  for (Seed seed = 0; seed < 20; ++seed) {
    StreamConfig c = small_config(1.0, 1.0, seed);
    c.record_decisions = true;
    GraphRowStream s(g);
    const StreamGraphResult r = stream_sparsify_graph(s, c);
    CHECK(r.stats.rounds.size() >= 1);
    bool found = false;
    for (const BufferedRow& b : r.stats.buffer.rows()) {
      if (b.source == bridge_source) {
        found = true;
        CHECK(b.multiplier == 1.0);
      }
    }
    CHECK(found);
    for (const auto& round : r.stats.decisions) {
      for (const SampleDecision& d : round) CHECK(d.source != bridge_source);
    }
    CHECK(connected_components(r.graph).count == 1);
  }
}

TEST_CASE("kept rows are rescaled by 1 / (beta tau)") {
  const WeightedGraph k12 = generate(GraphFamily::complete, 12, 0);
  const auto rows = repeated(k12, 3);
  StreamConfig c = small_config(1.0, 1.0, 5);
  c.record_decisions = true;
  VectorRowStream s(12, rows);
  const StreamResult r = stream_sparsify(s, c);
  REQUIRE(r.rounds.size() >= 1);
  // multipliers compose across rounds
  std::map<std::uint64_t, double> expected;
  for (const auto& round : r.decisions) {
    for (const SampleDecision& d : round) {
      if (!expected.count(d.source)) expected[d.source] = 1.0;
      expected[d.source] = d.kept ? expected[d.source] / d.p : 0.0;
    }
  }
  for (const BufferedRow& b : r.buffer.rows()) {
    const double m = expected.count(b.source) ? expected[b.source] : 1.0;
    CHECK(b.multiplier == doctest::Approx(m).epsilon(1e-12));
  }
  // buffer_graph turns multipliers into edge weights
  const WeightedGraph h = buffer_graph(r.buffer);
  for (std::size_t i = 0; i < h.num_edges(); ++i) {
    CHECK(h.edge(i).w == r.buffer[i].multiplier);
  }
}

TEST_CASE("resparsify_once") {
  const WeightedGraph k4 = generate(GraphFamily::complete, 4, 0);
  const auto rows = graph_rows(k4);

  SUBCASE("all beta tau >= 1 leaves the buffer alone") {
    SparsifierBuffer b = buffer_of(rows);
    Rng rng(1);
    const auto decisions = resparsify_once(b, exact_leverage(k4), 2.0, rng);
    CHECK(decisions.empty());
    CHECK(b.size() == rows.size());
  }
  SUBCASE("one row at p = 0.25") {
    const LeverageEstimates tau({0.25, 1, 1, 1, 1, 1}, Provenance::exact);
    const int trials = 10000;
    int kept = 0;
    DenseMatrix sum = DenseMatrix::Zero(4, 4);
    DenseMatrix sq = DenseMatrix::Zero(4, 4);
    for (int t = 0; t < trials; ++t) {
      SparsifierBuffer b = buffer_of(rows);
      Rng rng(derive_seed(3, t));
      const auto d = resparsify_once(b, tau, 1.0, rng);
      REQUIRE(d.size() == 1);
      CHECK(d[0].p == 0.25);
      if (d[0].kept) {
        ++kept;
        CHECK(b[0].multiplier == 4.0);
        CHECK(b.size() == 6);
      } else {
        CHECK(b.size() == 5);
        CHECK(b[0].source == 1);
      }
      const DenseMatrix m = b.matrix();
      sum += m;
      sq += m.cwiseProduct(m);
    }
    CHECK(std::abs(kept / double(trials) - 0.25) <= 0.015);
    const DenseMatrix mean = sum / trials;
    const DenseMatrix l = oracle::laplacian(k4);
    for (Eigen::Index i = 0; i < 4; ++i) {
      for (Eigen::Index j = 0; j < 4; ++j) {
        const double se = std::sqrt(std::max(0.0, sq(i, j) / trials - mean(i, j) * mean(i, j)) / trials);
        if (se < 1e-12) {
          CHECK(std::abs(mean(i, j) - l(i, j)) <= 1e-12);
        } else {
          CHECK(std::abs(mean(i, j) - l(i, j)) <= 3 * se);
        }
      }
    }
  }
  SUBCASE("estimates summing past 2n") {
    const WeightedGraph k6 = generate(GraphFamily::complete, 6, 0);
    SparsifierBuffer b = buffer_of(graph_rows(k6));
    Rng rng(0);
    const LeverageEstimates all_one(std::vector<double>(15, 1.0), Provenance::exact);
    CHECK_THROWS_AS(resparsify_once(b, all_one, 1.0, rng), ContractViolation);
  }
  SUBCASE("estimate count mismatch") {
    SparsifierBuffer b = buffer_of(rows);
    Rng rng(0);
    const LeverageEstimates few({0.5, 0.5}, Provenance::exact);
    CHECK_THROWS_AS(resparsify_once(b, few, 1.0, rng), ContractViolation);
  }
}

TEST_CASE("expected row count after one resparsification") {
  const WeightedGraph k40 = generate(GraphFamily::complete, 40, 0);
  const auto rows = graph_rows(k40);
  const LeverageEstimates tau = exact_leverage(k40);
  const double beta = 10.0;
  double expect = 0.0;
  double var = 0.0;
  for (double t : tau.values()) {
    const double p = std::min(1.0, beta * t);
    expect += p;
    var += p * (1 - p);
  }
  const int trials = 200;
  double total = 0.0;
  for (int t = 0; t < trials; ++t) {
    SparsifierBuffer b = buffer_of(rows);
    Rng rng(derive_seed(11, t));
    resparsify_once(b, tau, beta, rng);
    total += static_cast<double>(b.size());
  }
  CHECK(std::abs(total / trials - expect) <= 3.0 * std::sqrt(var / trials));
}

TEST_CASE("buffer leverage modes") {
  const WeightedGraph k30 = generate(GraphFamily::complete, 30, 0);
  const SparsifierBuffer b = buffer_of(repeated(k30, 2));
  StreamConfig c = small_config(1, 1);
  const LeverageEstimates exact = buffer_leverage(b, c, 1);
  CHECK(exact.provenance() == Provenance::exact);
  CHECK(exact.sum() == doctest::Approx(29.0));
  c.leverage_mode = LeverageMode::sketched;
  const LeverageEstimates sk = buffer_leverage(b, c, 1);
  CHECK(sk.provenance() == Provenance::sketched);
  CHECK(sk.sum() <= 2.0 * 30);
  c.leverage_mode = LeverageMode::automatic;
  CHECK(buffer_leverage(b, c, 1).provenance() == Provenance::exact);
}

TEST_CASE("sketched streaming run") {
  const WeightedGraph k20 = generate(GraphFamily::complete, 20, 0);
  const auto rows = repeated(k20, 6);
  StreamConfig c = small_config(0.25, 4.0, 4);
  c.leverage_mode = LeverageMode::sketched;
  VectorRowStream s(20, rows);
  const StreamResult r = stream_sparsify(s, c);
  CHECK(r.rounds.size() >= 1);
  for (const StreamRound& round : r.rounds) {
    CHECK(round.provenance == Provenance::sketched);
    CHECK(round.tau_sum <= 40.0);
  }
  CHECK(static_cast<double>(r.peak_rows) <= r.threshold + 1);
}

TEST_CASE("space bound and single pass") {
  const WeightedGraph k12 = generate(GraphFamily::complete, 12, 0);
  const auto rows = repeated(k12, 10);
  for (Seed seed = 0; seed < 5; ++seed) {
    StreamConfig c = small_config(1.0, 1.0, seed);
    c.assert_space = true;
    VectorRowStream s(12, rows);
    const StreamResult r = stream_sparsify(s, c);
    CHECK(r.rows_consumed == rows.size());
    CHECK(s.delivered() == rows.size());
    CHECK(static_cast<double>(r.peak_rows) <= r.threshold + 1);
    CHECK(r.rounds.size() >= 2);
    for (const StreamRound& round : r.rounds) {
      CHECK(round.rows_out <= round.rows_in);
      CHECK(round.tau_sum == doctest::Approx(11.0));
    }
  }
}

TEST_CASE("row of the wrong dimension") {
  WrongDimensionStream s;
  CHECK_THROWS_AS(stream_sparsify(s, small_config(1, 1)), InputError);
}

TEST_CASE("graph stream needs edge rows") {
  std::vector<Row> rows{Row(3, {{0, 1.0}, {1, 2.0}})};
  VectorRowStream s(3, rows);
  CHECK_THROWS_AS(stream_sparsify_graph(s, small_config(1, 1)), InputError);
}

TEST_CASE("general PSD rows") {
  // random dense rows in dimension 6
  Rng rng(8);
  std::vector<Row> rows;
  for (int i = 0; i < 200; ++i) {
    Vector v(6);
    for (int j = 0; j < 6; ++j) v(j) = rng.gaussian();
    rows.push_back(Row::from_dense(v));
  }
  StreamConfig c = small_config(1.0, 1.0, 2);
  VectorRowStream s(6, rows);
  const StreamResult r = stream_sparsify(s, c);
  CHECK(r.rounds.size() >= 1);
  const DenseMatrix full = gram(6, rows);
  const DenseMatrix approx = r.buffer.matrix();
  // range is everything, so eps* is a plain generalized eigenvalue spread
  const double eps = spectral_epsilon(full, approx).epsilon;
  CHECK(eps < 1.0);
}

TEST_CASE("cycle streamed with desk constants stays connected") {
  const WeightedGraph c100 = generate(GraphFamily::cycle, 100, 0);
  int connected = 0;
  for (Seed seed = 0; seed < 50; ++seed) {
    GraphRowStream s(c100);
    const StreamGraphResult r = stream_sparsify_graph(s, stream_config(desk_constants(), 0.5, seed));
    connected += connected_components(r.graph).count == 1 ? 1 : 0;
  }
  CHECK(connected >= 47);
}

TEST_CASE("stream run replays as a legal game") {
  const WeightedGraph k12 = generate(GraphFamily::complete, 12, 0);
  const auto rows = repeated(k12, 10);
  int replays = 0;
  for (Seed seed = 0; seed < 10; ++seed) {
    StreamConfig c = small_config(2.0, 1.0, seed);
    c.record_decisions = true;
    VectorRowStream s(12, rows);
    const StreamResult r = stream_sparsify(s, c);
    REQUIRE(r.rounds.size() >= 2);
    const replay::Outcome out = replay::stream_as_game(rows, r, c.epsilon);
    INFO(out.first_problem);
    CHECK(out.illegal == 0);
    CHECK(out.moves > 0);
    if (!out.won) {
      ++replays;
      // final game weights are the buffer multipliers
      std::vector<double> expect(rows.size(), 0.0);
      std::vector<bool> seen(rows.size(), false);
      for (const BufferedRow& b : r.buffer.rows()) expect[b.source] = b.multiplier;
      for (const auto& round : r.decisions) {
        for (const SampleDecision& d : round) seen[d.source] = true;
      }
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const double e = seen[i] ? expect[i] : 1.0;
        CHECK(out.final_weights[i] == doctest::Approx(e).epsilon(1e-12));
      }
    }
  }
  CHECK(replays >= 5);
}

TEST_CASE("determinism") {
  const WeightedGraph k12 = generate(GraphFamily::complete, 12, 0);
  const auto rows = repeated(k12, 10);
  auto run = [&](Seed seed) {
    VectorRowStream s(12, rows);
    return buffer_graph(stream_sparsify(s, small_config(1.0, 1.0, seed)).buffer);
  };
  CHECK(run(3) == run(3));
  CHECK_FALSE(run(3) == run(4));
}
