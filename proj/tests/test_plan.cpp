#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <set>
#include <vector>

#include "a2av/plan.hpp"

using a2av::Count;
using a2av::ExchangePlan;

namespace {

// Independent check: recompute one rank's packed displacements by scanning
// its counts row and summing.
void check_packed_displs(const ExchangePlan& plan) {
  for (int p = 0; p < plan.n_ranks; ++p) {
    Count send_off = 0;
    Count recv_off = 0;
    for (int q = 0; q < plan.n_ranks; ++q) {
      CHECK(plan.sdispls.at(p, q) == send_off);
      CHECK(plan.rdispls.at(p, q) == recv_off);
      send_off += plan.sendcounts.at(p, q);
      recv_off += plan.recvcounts.at(p, q);
    }
  }
}

// Brute-force slab oracle: count mesh cells one at a time instead of
// multiplying slab extents.
Count count_cells(Count grid_x, Count grid_y, int proc_rows, int proc_cols, int p, int q) {
  auto slab_of = [](Count coord, Count dim, int parts) {
    int s = 0;
    Count start = 0;
    for (;; ++s) {
      const Count len = dim / parts + (s < static_cast<int>(dim % parts) ? 1 : 0);
      if (coord < start + len) return s;
      start += len;
    }
  };
  Count cells = 0;
  for (Count x = 0; x < grid_x; ++x)
    for (Count y = 0; y < grid_y; ++y)
      if (slab_of(x, grid_x, proc_rows) == p / proc_cols &&
          slab_of(y, grid_y, proc_cols) == q % proc_cols)
        ++cells;
  return cells;
}

std::vector<std::byte> element_bytes(int src, int dst, Count k, int elem_size) {
  std::vector<std::byte> e(static_cast<std::size_t>(elem_size));
  for (int j = 0; j < elem_size; ++j) e[static_cast<std::size_t>(j)] = a2av::pattern_byte(src, dst, k, j);
  return e;
}

}  // namespace

TEST_CASE("uniform plan with a single rank is a self exchange") {
  const ExchangePlan plan = a2av::uniform_plan(1, 5, 8);
  CHECK(plan.n_ranks == 1);
  CHECK(plan.sendcounts.at(0, 0) == 5);
  CHECK(plan.sdispls.at(0, 0) == 0);
  CHECK(plan.recvcounts.at(0, 0) == 5);
  plan.validate();
}

TEST_CASE("uniform plan with zero counts is all zeros") {
  const ExchangePlan plan = a2av::uniform_plan(4, 0, 4);
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q) {
      CHECK(plan.sendcounts.at(p, q) == 0);
      CHECK(plan.recvcounts.at(p, q) == 0);
      CHECK(plan.sdispls.at(p, q) == 0);
      CHECK(plan.rdispls.at(p, q) == 0);
    }
  plan.validate();
}

TEST_CASE("uniform plan packs displacements in peer order") {
  const ExchangePlan plan = a2av::uniform_plan(3, 2, 8);
  for (int p = 0; p < 3; ++p) {
    CHECK(plan.sdispls.at(p, 0) == 0);
    CHECK(plan.sdispls.at(p, 1) == 2);
    CHECK(plan.sdispls.at(p, 2) == 4);
  }
  check_packed_displs(plan);
  CHECK(plan.send_buf_elems(0) == 6);
  CHECK(plan.recv_buf_elems(2) == 6);
}

TEST_CASE("uniform plan rejects bad arguments") {
  CHECK_THROWS_AS(a2av::uniform_plan(0, 1, 8), a2av::PlanError);
  CHECK_THROWS_AS(a2av::uniform_plan(2, -1, 8), a2av::PlanError);
  CHECK_THROWS_AS(a2av::uniform_plan(2, 1, 0), a2av::PlanError);
}

TEST_CASE("balanced split gives the first slabs the extra lines") {
  CHECK(a2av::balanced_split(5, 2) == std::vector<Count>{3, 2});
  CHECK(a2av::balanced_split(4, 2) == std::vector<Count>{2, 2});
  CHECK(a2av::balanced_split(7, 3) == std::vector<Count>{3, 2, 2});
  CHECK(a2av::balanced_split(2, 4) == std::vector<Count>{1, 1, 0, 0});
}

TEST_CASE("transpose plan on an even grid exchanges equal blocks") {
  const ExchangePlan plan = a2av::fft_transpose_plan(4, 4, 2, 2, 8);
  CHECK(plan.n_ranks == 4);
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q) {
      CHECK(plan.sendcounts.at(p, q) == 4);
      CHECK(plan.sendcounts.at(p, q) == count_cells(4, 4, 2, 2, p, q));
    }
  plan.validate();
  check_packed_displs(plan);
}

TEST_CASE("transpose plan on a single cell") {
  const ExchangePlan plan = a2av::fft_transpose_plan(1, 1, 1, 1, 8);
  CHECK(plan.n_ranks == 1);
  CHECK(plan.sendcounts.at(0, 0) == 1);
}

TEST_CASE("transpose plan on an uneven grid has variable counts") {
  const ExchangePlan plan = a2av::fft_transpose_plan(5, 5, 2, 2, 8);
  // Rank 0 owns the 3-row slab; peers 0 and 2 own the 3-column slab.
  CHECK(plan.sendcounts.at(0, 0) == 9);
  CHECK(plan.sendcounts.at(0, 1) == 6);
  CHECK(plan.sendcounts.at(3, 1) == 4);
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q)
      CHECK(plan.sendcounts.at(p, q) == count_cells(5, 5, 2, 2, p, q));
  plan.validate();
  check_packed_displs(plan);
}

TEST_CASE("transpose plan total volume is n_ranks blocks of the mesh") {
  for (auto [gx, gy, pr, pc] : {std::tuple<Count, Count, int, int>{4, 4, 2, 2},
                                {5, 5, 2, 2},
                                {7, 3, 3, 2},
                                {16, 16, 4, 2}}) {
    const ExchangePlan plan = a2av::fft_transpose_plan(gx, gy, pr, pc, 8);
    CHECK(plan.total_elements() == static_cast<Count>(pr) * pc * gx * gy);
    plan.validate();
    check_packed_displs(plan);
  }
}

TEST_CASE("transpose plan rejects a bad process grid") {
  CHECK_THROWS_AS(a2av::fft_transpose_plan(4, 4, 0, 2, 8), a2av::ConfigError);
  CHECK_THROWS_AS(a2av::fft_transpose_plan(0, 4, 2, 2, 8), a2av::PlanError);
}

TEST_CASE("scaled mesh dimension follows the square-root rule") {
  CHECK(a2av::scaled_grid_dim(4096, 64) == 32768);
  CHECK(a2av::scaled_grid_dim(4096, 32) == 23170);
  CHECK(a2av::scaled_grid_dim(4096, 1) == 4096);
}

TEST_CASE("scaled mesh dimension is monotone in the process count") {
  Count prev = 0;
  for (int n = 1; n <= 128; ++n) {
    const Count d = a2av::scaled_grid_dim(4096, n);
    CHECK(d >= prev);
    prev = d;
  }
}

TEST_CASE("random plan with zero bound is empty") {
  const ExchangePlan plan = a2av::random_plan(5, 0, 4, 123);
  for (int p = 0; p < 5; ++p)
    for (int q = 0; q < 5; ++q) CHECK(plan.sendcounts.at(p, q) == 0);
}

TEST_CASE("random plan is deterministic in the seed") {
  const ExchangePlan a = a2av::random_plan(6, 17, 8, 99);
  const ExchangePlan b = a2av::random_plan(6, 17, 8, 99);
  const ExchangePlan c = a2av::random_plan(6, 17, 8, 100);
  bool same = true;
  bool differs = false;
  for (int p = 0; p < 6; ++p)
    for (int q = 0; q < 6; ++q) {
      same = same && a.sendcounts.at(p, q) == b.sendcounts.at(p, q);
      differs = differs || a.sendcounts.at(p, q) != c.sendcounts.at(p, q);
    }
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("random plans satisfy the consistency invariant") {
  a2av::ExchangePlan plan = a2av::random_plan(4, 7, 8, 42);
  plan.validate();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const ExchangePlan p = a2av::random_plan(2 + static_cast<int>(seed % 15), 64, 4, seed);
    p.validate();
    check_packed_displs(p);
  }
}

TEST_CASE("validate rejects inconsistent counts") {
  ExchangePlan plan = a2av::uniform_plan(3, 2, 8);
  plan.sendcounts.at(0, 1) = 3;
  CHECK_THROWS_AS(plan.validate(), a2av::PlanError);
}

TEST_CASE("validate rejects negative counts") {
  ExchangePlan plan = a2av::uniform_plan(2, 2, 8);
  plan.sendcounts.at(1, 0) = -1;
  plan.recvcounts.at(0, 1) = -1;
  CHECK_THROWS_AS(plan.validate(), a2av::PlanError);
}

TEST_CASE("validate rejects overlapping buffer regions") {
  ExchangePlan plan = a2av::uniform_plan(3, 2, 8);
  plan.sdispls.at(0, 1) = 1;
  CHECK_THROWS_AS(plan.validate(), a2av::PlanError);
}

TEST_CASE("validate accepts non-packed disjoint layouts") {
  ExchangePlan plan = a2av::uniform_plan(3, 2, 8);
  // Reverse peer order in rank 0's send buffer; still disjoint.
  plan.sdispls.at(0, 0) = 4;
  plan.sdispls.at(0, 1) = 2;
  plan.sdispls.at(0, 2) = 0;
  plan.validate();
}

TEST_CASE("pattern elements identify source, destination and index") {
  CHECK(element_bytes(1, 2, 0, 8) != element_bytes(2, 1, 0, 8));
  std::set<std::vector<std::byte>> seen;
  for (int src = 0; src < 4; ++src)
    for (int dst = 0; dst < 4; ++dst)
      for (Count k = 0; k < 16; ++k) CHECK(seen.insert(element_bytes(src, dst, k, 8)).second);
}

TEST_CASE("fill pattern sizes buffers to the plan") {
  ExchangePlan plan = a2av::random_plan(4, 9, 8, 7);
  const a2av::RankBuffers bufs = a2av::fill_pattern(plan, 2);
  CHECK(bufs.send_buf.size() == plan.send_buf_elems(2) * 8);
  CHECK(bufs.recv_buf.size() == plan.recv_buf_elems(2) * 8);
  // Every pattern byte in place.
  for (int q = 0; q < 4; ++q)
    for (Count k = 0; k < plan.sendcounts.at(2, q); ++k)
      for (int j = 0; j < 8; ++j)
        CHECK(bufs.send_buf[plan.send_offset_bytes(2, q) + static_cast<std::size_t>(k) * 8 + j] ==
              a2av::pattern_byte(2, q, k, j));
}

TEST_CASE("zero-count peers contribute no bytes") {
  ExchangePlan plan = a2av::uniform_plan(3, 0, 4);
  const a2av::RankBuffers bufs = a2av::fill_pattern(plan, 1);
  CHECK(bufs.send_buf.empty());
  CHECK(bufs.recv_buf.empty());
}
