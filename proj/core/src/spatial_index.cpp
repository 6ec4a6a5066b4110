#include "rffs/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>
#include <utility>

#include "rffs/error.hpp"
#include "rffs/random.hpp"

namespace rffs {

namespace {

// One sort-tile-recursive packing pass: orders items into runs of at most
// `capacity` that are spatially compact. Returns the permutation, grouped.
template <typename CenterFn>
std::vector<std::size_t> str_order(std::size_t n, std::size_t capacity, CenterFn center) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  const std::size_t groups = (n + capacity - 1) / capacity;
  const auto slices = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(groups))));
  const std::size_t slice_len = slices * capacity;

  auto by = [&](bool use_x) {
    return [&, use_x](std::size_t a, std::size_t b) {
      const XY ca = center(a);
      const XY cb = center(b);
      const double ka = use_x ? ca.x : ca.y;
      const double kb = use_x ? cb.x : cb.y;
      return ka < kb || (ka == kb && a < b);
    };
  };

  std::sort(order.begin(), order.end(), by(true));
  for (std::size_t start = 0; start < n; start += slice_len) {
    const std::size_t end = std::min(n, start + slice_len);
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(start),
              order.begin() + static_cast<std::ptrdiff_t>(end), by(false));
  }
  return order;
}

}  // namespace

TileIndex::TileIndex(std::vector<TileRecord> records) : records_(std::move(records)) {
  if (records_.empty()) throw Error(ErrorCode::EmptyManifest, "no tile records");

  auto rect_of = [](const BBox& b) { return Rect{b.min_x(), b.min_y(), b.max_x(), b.max_y()}; };
  auto merge = [](Rect a, const Rect& b) {
    a.min_x = std::min(a.min_x, b.min_x);
    a.min_y = std::min(a.min_y, b.min_y);
    a.max_x = std::max(a.max_x, b.max_x);
    a.max_y = std::max(a.max_y, b.max_y);
    return a;
  };

  // Leaf level.
  const auto leaf_order = str_order(records_.size(), kNodeCapacity, [&](std::size_t i) {
    return records_[i].footprint.center();
  });
  leaf_entries_ = leaf_order;
  std::vector<std::size_t> level;
  for (std::size_t start = 0; start < leaf_order.size(); start += kNodeCapacity) {
    const std::size_t count = std::min(kNodeCapacity, leaf_order.size() - start);
    Rect bounds = rect_of(records_[leaf_order[start]].footprint);
    for (std::size_t s = start + 1; s < start + count; ++s) {
      bounds = merge(bounds, rect_of(records_[leaf_order[s]].footprint));
    }
    level.push_back(nodes_.size());
    nodes_.push_back(Node{bounds, start, count, true});
  }
  depth_ = 1;

  // Internal levels; children of one parent are stored contiguously.
  while (level.size() > 1) {
    const auto order = str_order(level.size(), kNodeCapacity, [&](std::size_t i) {
      const Rect& r = nodes_[level[i]].bounds;
      return XY{0.5 * (r.min_x + r.max_x), 0.5 * (r.min_y + r.max_y)};
    });
    std::vector<Node> reordered;
    reordered.reserve(order.size());
    for (std::size_t i : order) reordered.push_back(nodes_[level[i]]);
    const std::size_t base = nodes_.size();
    nodes_.insert(nodes_.end(), reordered.begin(), reordered.end());

    std::vector<std::size_t> parents;
    for (std::size_t start = 0; start < order.size(); start += kNodeCapacity) {
      const std::size_t count = std::min(kNodeCapacity, order.size() - start);
      Rect bounds = nodes_[base + start].bounds;
      for (std::size_t s = start + 1; s < start + count; ++s) {
        bounds = merge(bounds, nodes_[base + s].bounds);
      }
      parents.push_back(nodes_.size());
      nodes_.push_back(Node{bounds, base + start, count, false});
    }
    level = std::move(parents);
    ++depth_;
  }
  root_ = level.front();
}

std::vector<std::size_t> TileIndex::containing(XY p) const {
  std::vector<std::size_t> hits;
  std::vector<std::size_t> stack{root_};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (!node.bounds.contains(p)) continue;
    for (std::size_t c = node.first; c < node.first + node.count; ++c) {
      if (node.leaf) {
        const std::size_t rec = leaf_entries_[c];
        if (records_[rec].footprint.contains(p)) hits.push_back(rec);
      } else {
        stack.push_back(c);
      }
    }
  }
  std::sort(hits.begin(), hits.end());
  return hits;
}

const TileRecord& TileIndex::locate(XY p) const {
  const auto hits = containing(p);
  if (hits.empty()) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "no tile contains (" << p.x << ", " << p.y << ")";
    throw Error(ErrorCode::NoTileFound, msg.str());
  }
  const auto best = std::min_element(hits.begin(), hits.end(), [&](std::size_t a, std::size_t b) {
    return records_[a].tile_id < records_[b].tile_id;
  });
  return records_[*best];
}

TileIndex build_tile_index(std::vector<TileRecord> records) {
  return TileIndex(std::move(records));
}

const TileRecord& locate_tile(const TileIndex& index, XY p) { return index.locate(p); }

// ---------------------------------------------------------------------------

std::size_t retained_count(std::size_t n, double fraction) {
  if (n == 0) return 0;
  const auto m = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  return std::clamp<std::size_t>(m, 1, n);
}

std::vector<std::size_t> select_subset(std::size_t n, double fraction, std::uint64_t seed) {
  const std::size_t m = retained_count(n, fraction);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (m < n) {
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.bounded(n - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
  }
  return idx;
}

KdTree::KdTree(const PointCloud& cloud, double fraction, std::uint64_t seed)
    : source_size_(cloud.size()) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "k-d tree over empty cloud");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    std::ostringstream msg;
    msg << "subsample fraction " << fraction << " outside (0, 1]";
    throw Error(ErrorCode::InvalidFraction, msg.str());
  }
  retained_ = select_subset(cloud.size(), fraction, seed);
  entries_.reserve(retained_.size());
  for (std::size_t i : retained_) entries_.push_back({cloud[i].x, cloud[i].y, i});
  build(0, entries_.size(), 0);
}

void KdTree::build(std::size_t lo, std::size_t hi, unsigned depth) {
  if (hi - lo <= 1) return;
  const std::size_t mid = lo + (hi - lo) / 2;
  const bool use_x = depth % 2 == 0;
  std::nth_element(entries_.begin() + static_cast<std::ptrdiff_t>(lo),
                   entries_.begin() + static_cast<std::ptrdiff_t>(mid),
                   entries_.begin() + static_cast<std::ptrdiff_t>(hi),
                   [use_x](const Entry& a, const Entry& b) {
                     const double ka = use_x ? a.x : a.y;
                     const double kb = use_x ? b.x : b.y;
                     return ka < kb || (ka == kb && a.index < b.index);
                   });
  build(lo, mid, depth + 1);
  build(mid + 1, hi, depth + 1);
}

std::vector<std::size_t> KdTree::k_nearest(XY q, std::size_t k, SearchStats* stats) const {
  if (k == 0) throw Error(ErrorCode::InvalidK, "k must be positive");
  k = std::min(k, entries_.size());

  // Max-heap on (distance, index): the top is the current worst candidate.
  using Candidate = std::pair<double, std::size_t>;
  std::priority_queue<Candidate> heap;
  SearchStats local;

  auto visit = [&](auto&& self, std::size_t lo, std::size_t hi, unsigned depth) -> void {
    if (lo >= hi) return;
    ++local.nodes_visited;
    const std::size_t mid = lo + (hi - lo) / 2;
    const Entry& e = entries_[mid];
    const double dx = q.x - e.x;
    const double dy = q.y - e.y;
    const Candidate cand{dx * dx + dy * dy, e.index};
    ++local.distance_evaluations;
    if (heap.size() < k) {
      heap.push(cand);
    } else if (cand < heap.top()) {
      heap.pop();
      heap.push(cand);
    }

    const double diff = (depth % 2 == 0) ? dx : dy;
    const bool go_left_first = diff < 0.0;
    if (go_left_first) {
      self(self, lo, mid, depth + 1);
    } else {
      self(self, mid + 1, hi, depth + 1);
    }
    // Far side points are at least |diff| away; equal distances may still win
    // the index tie-break, so only strictly farther planes are pruned.
    if (heap.size() < k || diff * diff <= heap.top().first) {
      if (go_left_first) {
        self(self, mid + 1, hi, depth + 1);
      } else {
        self(self, lo, mid, depth + 1);
      }
    }
  };
  visit(visit, 0, entries_.size(), 0);

  std::vector<std::size_t> out(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = heap.top().second;
    heap.pop();
  }
  if (stats != nullptr) {
    stats->distance_evaluations += local.distance_evaluations;
    stats->nodes_visited += local.nodes_visited;
  }
  return out;
}

std::size_t KdTree::nearest(XY q, SearchStats* stats) const {
  return k_nearest(q, 1, stats).front();
}

KdTree build_kdtree(const PointCloud& cloud, double fraction, std::uint64_t seed) {
  return KdTree(cloud, fraction, seed);
}

}  // namespace rffs
