#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rffs/types.hpp"

namespace rffs {

struct TileRecord {
  std::string tile_id;
  BBox footprint;
  std::string path;
};

/// Bulk-loaded (sort-tile-recursive) R-tree over tile footprints. Immutable
/// after construction; concurrent queries are safe.
class TileIndex {
 public:
  static constexpr std::size_t kNodeCapacity = 16;

  explicit TileIndex(std::vector<TileRecord> records);

  std::size_t size() const { return records_.size(); }
  const std::vector<TileRecord>& records() const { return records_; }

  /// Indices into records() of every footprint containing p (closed
  /// boundaries), ascending.
  std::vector<std::size_t> containing(XY p) const;

  /// The containing tile; shared-edge ties go to the smallest tile_id.
  const TileRecord& locate(XY p) const;

  /// Height of the tree (1 for a single leaf).
  std::size_t depth() const { return depth_; }

 private:
  struct Rect {
    double min_x, min_y, max_x, max_y;
    bool contains(XY p) const {
      return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
    }
  };
  struct Node {
    Rect bounds;
    std::size_t first;  // first child node, or first slot in leaf_entries_
    std::size_t count;
    bool leaf;
  };

  std::vector<TileRecord> records_;
  std::vector<Node> nodes_;
  std::vector<std::size_t> leaf_entries_;  // record indices, grouped per leaf
  std::size_t root_ = 0;
  std::size_t depth_ = 0;
};

/// Throws EmptyManifest when records is empty.
TileIndex build_tile_index(std::vector<TileRecord> records);

/// Throws NoTileFound when no footprint contains p.
const TileRecord& locate_tile(const TileIndex& index, XY p);

/// Work counters filled by KdTree queries when requested.
struct SearchStats {
  std::size_t distance_evaluations = 0;
  std::size_t nodes_visited = 0;
};

/// Balanced 2D k-d tree over a seeded random subset of a cloud. Distances are
/// measured in the xy-plane only. Results refer to indices of the source
/// cloud, not of the retained subset.
class KdTree {
 public:
  KdTree(const PointCloud& cloud, double fraction, std::uint64_t seed);

  std::size_t size() const { return entries_.size(); }
  std::size_t source_size() const { return source_size_; }

  /// Retained source indices, ascending.
  std::span<const std::size_t> retained() const { return retained_; }

  /// Up to k source indices ordered by squared xy-distance, ties broken by
  /// smaller index. Throws InvalidK when k is 0.
  std::vector<std::size_t> k_nearest(XY q, std::size_t k, SearchStats* stats = nullptr) const;

  std::size_t nearest(XY q, SearchStats* stats = nullptr) const;

 private:
  struct Entry {
    double x, y;
    std::size_t index;
  };

  void build(std::size_t lo, std::size_t hi, unsigned depth);

  std::vector<Entry> entries_;  // implicit tree: each range's middle is its node
  std::vector<std::size_t> retained_;
  std::size_t source_size_ = 0;
};

/// Number of points kept when subsampling n points at the given fraction:
/// round(fraction * n), at least 1 for a non-empty cloud.
std::size_t retained_count(std::size_t n, double fraction);

/// Seeded uniform subset selection: partial Fisher-Yates over SplitMix64,
/// returned ascending. Pure function of (n, fraction, seed).
std::vector<std::size_t> select_subset(std::size_t n, double fraction, std::uint64_t seed);

/// Throws EmptyCloud for an empty cloud and InvalidFraction unless
/// 0 < fraction <= 1.
KdTree build_kdtree(const PointCloud& cloud, double fraction, std::uint64_t seed);

}  // namespace rffs
