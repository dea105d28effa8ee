#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "a2av/error.hpp"

namespace a2av {

using Count = std::int64_t;

/// Dense n x n matrix of per-(rank,peer) counts or displacements.
class CountMatrix {
 public:
  CountMatrix() = default;
  explicit CountMatrix(int n) : n_(n), v_(static_cast<std::size_t>(n) * n, 0) {}

  Count& at(int p, int q) { return v_[static_cast<std::size_t>(p) * n_ + q]; }
  Count at(int p, int q) const { return v_[static_cast<std::size_t>(p) * n_ + q]; }

  /// Row p as a span of n entries.
  std::span<const Count> row(int p) const {
    return {v_.data() + static_cast<std::size_t>(p) * n_, static_cast<std::size_t>(n_)};
  }

  int size() const { return n_; }

 private:
  int n_ = 0;
  std::vector<Count> v_;
};

/// Variable-count exchange plan: who sends how much to whom, and where the
/// data lives in each rank's send/recv buffer. Counts are in elements of
/// elem_size bytes. Immutable after construction; shared read-only across
/// rank contexts.
struct ExchangePlan {
  int n_ranks = 0;
  int elem_size = 0;
  CountMatrix sendcounts;
  CountMatrix sdispls;
  CountMatrix recvcounts;
  CountMatrix rdispls;

  Count send_count(int p, int q) const { return sendcounts.at(p, q); }
  Count recv_count(int p, int q) const { return recvcounts.at(p, q); }

  std::size_t send_bytes(int p, int q) const {
    return static_cast<std::size_t>(sendcounts.at(p, q)) * elem_size;
  }
  std::size_t recv_bytes(int p, int q) const {
    return static_cast<std::size_t>(recvcounts.at(p, q)) * elem_size;
  }
  std::size_t send_offset_bytes(int p, int q) const {
    return static_cast<std::size_t>(sdispls.at(p, q)) * elem_size;
  }
  std::size_t recv_offset_bytes(int p, int q) const {
    return static_cast<std::size_t>(rdispls.at(p, q)) * elem_size;
  }

  /// Minimum send/recv buffer sizes for rank p, in elements.
  std::size_t send_buf_elems(int p) const;
  std::size_t recv_buf_elems(int p) const;

  /// Sum of all sendcounts across every (p, q) pair.
  Count total_elements() const;

  /// Throws PlanError if the plan violates consistency (sendcounts[p][q] ==
  /// recvcounts[q][p]), has negative counts/displacements, or has overlapping
  /// buffer regions within a rank.
  void validate() const;
};

/// Per-rank payload buffers backing one run of a schedule.
struct RankBuffers {
  std::vector<std::byte> send_buf;
  std::vector<std::byte> recv_buf;
};

/// Every pair exchanges exactly count_per_pair elements; displacements packed
/// in peer-rank order.
ExchangePlan uniform_plan(int n_ranks, Count count_per_pair, int elem_size);

/// Pencil-transpose workload over a grid_x by grid_y mesh on a proc_rows x
/// proc_cols process grid (row-major rank order). Rank p holds the row slab
/// of its grid row; it sends to rank q the intersection of that slab with
/// q's column slab. Slabs use the balanced split: the first (dim mod parts)
/// slabs get one extra line. Throws ConfigError if the process grid does not
/// match proc_rows * proc_cols ranks.
ExchangePlan fft_transpose_plan(Count grid_x, Count grid_y, int proc_rows, int proc_cols,
                                int elem_size);

/// floor(base_dim * sqrt(n_procs)): mesh dimension for a weak-scaling run.
Count scaled_grid_dim(Count base_dim, int n_procs);

/// Seeded random plan: sendcounts uniform in [0, max_count], recvcounts the
/// transpose, displacements packed. Deterministic for a given seed.
ExchangePlan random_plan(int n_ranks, Count max_count, int elem_size, std::uint64_t seed);

/// Byte j of the element at index k of the (src -> dst) block. Injective in
/// (src, dst, k) for elem_size >= 8; a mixed fingerprint below that.
std::byte pattern_byte(int src, int dst, Count k, int byte_index);

/// Send buffer filled with the (src, dst, k) tagged pattern, recv buffer
/// zeroed and sized to the plan.
RankBuffers fill_pattern(const ExchangePlan& plan, int rank);

/// Balanced floor/ceil split of dim into parts contiguous slabs.
std::vector<Count> balanced_split(Count dim, int parts);

}  // namespace a2av
