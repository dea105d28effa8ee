#include "a2av/plan.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "a2av/rng.hpp"

namespace a2av {

namespace {

/// Packed prefix-sum displacements for one rank's counts row.
void pack_row_displs(const CountMatrix& counts, CountMatrix& displs, int p) {
  Count off = 0;
  for (int q = 0; q < counts.size(); ++q) {
    displs.at(p, q) = off;
    off += counts.at(p, q);
  }
}

void pack_displs(ExchangePlan& plan) {
  for (int p = 0; p < plan.n_ranks; ++p) {
    pack_row_displs(plan.sendcounts, plan.sdispls, p);
    pack_row_displs(plan.recvcounts, plan.rdispls, p);
  }
}

void transpose_into(const CountMatrix& src, CountMatrix& dst) {
  for (int p = 0; p < src.size(); ++p)
    for (int q = 0; q < src.size(); ++q) dst.at(p, q) = src.at(q, p);
}

ExchangePlan make_empty(int n_ranks, int elem_size) {
  if (n_ranks < 1) throw PlanError("n_ranks must be >= 1");
  if (elem_size < 1) throw PlanError("elem_size must be >= 1");
  ExchangePlan plan;
  plan.n_ranks = n_ranks;
  plan.elem_size = elem_size;
  plan.sendcounts = CountMatrix(n_ranks);
  plan.sdispls = CountMatrix(n_ranks);
  plan.recvcounts = CountMatrix(n_ranks);
  plan.rdispls = CountMatrix(n_ranks);
  return plan;
}

}  // namespace

std::size_t ExchangePlan::send_buf_elems(int p) const {
  Count need = 0;
  for (int q = 0; q < n_ranks; ++q)
    need = std::max(need, sdispls.at(p, q) + sendcounts.at(p, q));
  return static_cast<std::size_t>(need);
}

std::size_t ExchangePlan::recv_buf_elems(int p) const {
  Count need = 0;
  for (int q = 0; q < n_ranks; ++q)
    need = std::max(need, rdispls.at(p, q) + recvcounts.at(p, q));
  return static_cast<std::size_t>(need);
}

Count ExchangePlan::total_elements() const {
  Count total = 0;
  for (int p = 0; p < n_ranks; ++p)
    for (int q = 0; q < n_ranks; ++q) total += sendcounts.at(p, q);
  return total;
}

void ExchangePlan::validate() const {
  if (n_ranks < 1) throw PlanError("plan has no ranks");
  if (elem_size < 1) throw PlanError("plan elem_size must be >= 1");
  for (int p = 0; p < n_ranks; ++p) {
    for (int q = 0; q < n_ranks; ++q) {
      if (sendcounts.at(p, q) < 0 || recvcounts.at(p, q) < 0)
        throw PlanError("negative count at (" + std::to_string(p) + "," + std::to_string(q) + ")");
      if (sdispls.at(p, q) < 0 || rdispls.at(p, q) < 0)
        throw PlanError("negative displacement at (" + std::to_string(p) + "," +
                        std::to_string(q) + ")");
      if (sendcounts.at(p, q) != recvcounts.at(q, p))
        throw PlanError("consistency violated: sendcounts[" + std::to_string(p) + "][" +
                        std::to_string(q) + "] != recvcounts[" + std::to_string(q) + "][" +
                        std::to_string(p) + "]");
    }
  }
  // Non-overlap of [displ, displ+count) regions within each rank's buffers.
  auto check_disjoint = [&](const CountMatrix& displs, const CountMatrix& counts, int p,
                            const char* which) {
    std::vector<std::pair<Count, Count>> regions;
    regions.reserve(static_cast<std::size_t>(n_ranks));
    for (int q = 0; q < n_ranks; ++q)
      if (counts.at(p, q) > 0)
        regions.emplace_back(displs.at(p, q), displs.at(p, q) + counts.at(p, q));
    std::sort(regions.begin(), regions.end());
    for (std::size_t i = 1; i < regions.size(); ++i)
      if (regions[i].first < regions[i - 1].second)
        throw PlanError(std::string(which) + " regions overlap at rank " + std::to_string(p));
  };
  for (int p = 0; p < n_ranks; ++p) {
    check_disjoint(sdispls, sendcounts, p, "send");
    check_disjoint(rdispls, recvcounts, p, "recv");
  }
}

ExchangePlan uniform_plan(int n_ranks, Count count_per_pair, int elem_size) {
  if (count_per_pair < 0) throw PlanError("count_per_pair must be >= 0");
  ExchangePlan plan = make_empty(n_ranks, elem_size);
  for (int p = 0; p < n_ranks; ++p)
    for (int q = 0; q < n_ranks; ++q) {
      plan.sendcounts.at(p, q) = count_per_pair;
      plan.recvcounts.at(p, q) = count_per_pair;
    }
  pack_displs(plan);
  return plan;
}

std::vector<Count> balanced_split(Count dim, int parts) {
  if (dim < 0 || parts < 1) throw PlanError("balanced_split: bad arguments");
  std::vector<Count> lens(static_cast<std::size_t>(parts));
  const Count base = dim / parts;
  const Count extra = dim % parts;
  for (int r = 0; r < parts; ++r) lens[static_cast<std::size_t>(r)] = base + (r < extra ? 1 : 0);
  return lens;
}

ExchangePlan fft_transpose_plan(Count grid_x, Count grid_y, int proc_rows, int proc_cols,
                                int elem_size) {
  if (grid_x < 1 || grid_y < 1) throw PlanError("grid dimensions must be >= 1");
  if (proc_rows < 1 || proc_cols < 1)
    throw ConfigError("process grid dimensions must be >= 1");
  const int n = proc_rows * proc_cols;
  const std::vector<Count> row_lens = balanced_split(grid_x, proc_rows);
  const std::vector<Count> col_lens = balanced_split(grid_y, proc_cols);

  ExchangePlan plan = make_empty(n, elem_size);
  // Rank p sits at (p / proc_cols, p % proc_cols) in the process grid. Its
  // row slab intersected with q's column slab is a full rectangle, so the
  // count is just the product of the slab extents.
  for (int p = 0; p < n; ++p) {
    const Count rows = row_lens[static_cast<std::size_t>(p / proc_cols)];
    for (int q = 0; q < n; ++q) {
      const Count cols = col_lens[static_cast<std::size_t>(q % proc_cols)];
      plan.sendcounts.at(p, q) = rows * cols;
    }
  }
  transpose_into(plan.sendcounts, plan.recvcounts);
  pack_displs(plan);
  return plan;
}

Count scaled_grid_dim(Count base_dim, int n_procs) {
  if (base_dim < 1 || n_procs < 1) throw PlanError("scaled_grid_dim: bad arguments");
  return static_cast<Count>(
      std::floor(static_cast<double>(base_dim) * std::sqrt(static_cast<double>(n_procs))));
}

ExchangePlan random_plan(int n_ranks, Count max_count, int elem_size, std::uint64_t seed) {
  if (max_count < 0) throw PlanError("max_count must be >= 0");
  ExchangePlan plan = make_empty(n_ranks, elem_size);
  SplitMix64 rng(derive_seed(seed, 0x706c616eULL));
  for (int p = 0; p < n_ranks; ++p)
    for (int q = 0; q < n_ranks; ++q)
      plan.sendcounts.at(p, q) =
          static_cast<Count>(rng.next_below(static_cast<std::uint64_t>(max_count) + 1));
  transpose_into(plan.sendcounts, plan.recvcounts);
  pack_displs(plan);
  return plan;
}

std::byte pattern_byte(int src, int dst, Count k, int byte_index) {
  // 8-byte chunks of the stream are mix64 outputs; chunk 0 is a bijection of
  // the packed (src, dst, k) key, so 8-byte elements are strictly injective.
  const std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(src)) << 44) ^
                            (static_cast<std::uint64_t>(static_cast<std::uint32_t>(dst)) << 24) ^
                            static_cast<std::uint64_t>(k);
  const int chunk = byte_index / 8;
  std::uint64_t h = mix64(key);
  for (int c = 0; c < chunk; ++c) h = mix64(h);
  return static_cast<std::byte>((h >> (8 * (byte_index % 8))) & 0xffU);
}

RankBuffers fill_pattern(const ExchangePlan& plan, int rank) {
  RankBuffers bufs;
  bufs.send_buf.resize(plan.send_buf_elems(rank) * static_cast<std::size_t>(plan.elem_size));
  bufs.recv_buf.resize(plan.recv_buf_elems(rank) * static_cast<std::size_t>(plan.elem_size));
  for (int q = 0; q < plan.n_ranks; ++q) {
    const Count count = plan.sendcounts.at(rank, q);
    std::byte* base = bufs.send_buf.data() + plan.send_offset_bytes(rank, q);
    for (Count k = 0; k < count; ++k)
      for (int j = 0; j < plan.elem_size; ++j)
        base[k * plan.elem_size + j] = pattern_byte(rank, q, k, j);
  }
  return bufs;
}

}  // namespace a2av
