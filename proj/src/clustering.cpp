#include "egosum/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>
#include <utility>

namespace egosum {

std::string_view to_string(LinkageMethod m) {
  switch (m) {
    case LinkageMethod::kSingle: return "single";
    case LinkageMethod::kComplete: return "complete";
    case LinkageMethod::kAverage: return "average";
    case LinkageMethod::kWard: return "ward";
  }
  return "unknown";
}

LinkageMethod parse_linkage(std::string_view name) {
  for (auto m : {LinkageMethod::kSingle, LinkageMethod::kComplete, LinkageMethod::kAverage,
                 LinkageMethod::kWard}) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError("unknown linkage '" + std::string(name) + "'");
}

namespace {

// Fills the upper triangle of `out` for every row i with i % stride == offset.
// Four columns are accumulated together to overlap the add latency; each entry
// is still a plain ascending-k reduction.
void distance_rows(std::span<const FrameDescriptor> frames, DistanceMatrix& out, std::size_t offset,
                   std::size_t stride) {
  const std::size_t n = frames.size();
  const std::size_t dim = frames.empty() ? 0 : frames[0].features.size();
  for (std::size_t i = offset; i < n; i += stride) {
    const double* a = frames[i].features.data();
    std::size_t j = i + 1;
    for (; j + 4 <= n; j += 4) {
      const double* b0 = frames[j].features.data();
      const double* b1 = frames[j + 1].features.data();
      const double* b2 = frames[j + 2].features.data();
      const double* b3 = frames[j + 3].features.data();
      double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double x = a[k];
        const double d0 = x - b0[k];
        const double d1 = x - b1[k];
        const double d2 = x - b2[k];
        const double d3 = x - b3[k];
        s0 += d0 * d0;
        s1 += d1 * d1;
        s2 += d2 * d2;
        s3 += d3 * d3;
      }
      out(i, j) = std::sqrt(s0);
      out(i, j + 1) = std::sqrt(s1);
      out(i, j + 2) = std::sqrt(s2);
      out(i, j + 3) = std::sqrt(s3);
    }
    for (; j < n; ++j) {
      const double* b = frames[j].features.data();
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = a[k] - b[k];
        s += d * d;
      }
      out(i, j) = std::sqrt(s);
    }
  }
}

}  // namespace

DistanceMatrix pairwise_distances(std::span<const FrameDescriptor> frames, unsigned threads) {
  const std::size_t n = frames.size();
  if (n == 0) throw ValidationError("cannot compute distances of an empty frame set");
  const std::size_t dim = frames[0].features.size();
  for (const auto& f : frames) {
    if (f.features.size() != dim) throw ValidationError("frames differ in feature dimension");
    for (double v : f.features) {
      if (!std::isfinite(v)) throw ValidationError("non-finite feature in frame '" + f.frame_id + "'");
    }
  }

  DistanceMatrix out(n);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(threads, n);
  if (workers <= 1) {
    distance_rows(frames, out, 0, 1);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] { distance_rows(frames, out, t, workers); });
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) out(j, i) = out(i, j);
  }
  return out;
}

DistanceMatrix pairwise_distances(const Photostream& stream, unsigned threads) {
  return pairwise_distances(std::span<const FrameDescriptor>(stream.frames()), threads);
}

namespace {

using PairKey = std::pair<std::size_t, std::size_t>;

PairKey make_key(std::size_t id1, std::size_t id2) { return {std::min(id1, id2), std::max(id1, id2)}; }

bool precedes(double d1, const PairKey& k1, double d2, const PairKey& k2) {
  return d1 < d2 || (d1 == d2 && k1 < k2);
}

double lance_williams(LinkageMethod linkage, double d_ak, double d_bk, double d_ab, double n_a,
                      double n_b, double n_k) {
  switch (linkage) {
    case LinkageMethod::kSingle: return std::min(d_ak, d_bk);
    case LinkageMethod::kComplete: return std::max(d_ak, d_bk);
    case LinkageMethod::kAverage: return (n_a * d_ak + n_b * d_bk) / (n_a + n_b);
    case LinkageMethod::kWard: {
      const double t = ((n_a + n_k) * d_ak * d_ak + (n_b + n_k) * d_bk * d_bk - n_k * d_ab * d_ab) /
                       (n_a + n_b + n_k);
      return std::sqrt(std::max(t, 0.0));
    }
  }
  return 0.0;
}

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Working state: slots hold active clusters; the linkage matrix is indexed by slot.
class Agglomerator {
 public:
  Agglomerator(const DistanceMatrix& dist, LinkageMethod linkage)
      : n_(dist.order()), linkage_(linkage), d_(dist), id_(n_), size_(n_, 1),
        nn_(n_, kNone), nn_dist_(n_, std::numeric_limits<double>::infinity()) {
    std::iota(id_.begin(), id_.end(), 0);
    active_.resize(n_);
    std::iota(active_.begin(), active_.end(), 0);
    for (std::size_t s : active_) refresh(s);
  }

  Dendrogram run() {
    Dendrogram out;
    out.leaf_count = n_;
    out.merges.reserve(n_ > 0 ? n_ - 1 : 0);
    for (std::size_t step = 0; step + 1 < n_; ++step) {
      std::size_t best = kNone;
      for (std::size_t s : active_) {
        if (best == kNone || precedes(nn_dist_[s], make_key(id_[s], id_[nn_[s]]), nn_dist_[best],
                                      make_key(id_[best], id_[nn_[best]]))) {
          best = s;
        }
      }
      const std::size_t keep = best;
      const std::size_t gone = nn_[best];
      const double merge_distance = nn_dist_[best];
      const auto [ida, idb] = make_key(id_[keep], id_[gone]);
      const double n_a = static_cast<double>(size_[keep]);
      const double n_b = static_cast<double>(size_[gone]);

      active_.erase(std::find(active_.begin(), active_.end(), gone));
      for (std::size_t k : active_) {
        if (k == keep) continue;
        const double updated = lance_williams(linkage_, d_(keep, k), d_(gone, k), merge_distance,
                                              n_a, n_b, static_cast<double>(size_[k]));
        d_(keep, k) = updated;
        d_(k, keep) = updated;
      }
      id_[keep] = n_ + step;
      size_[keep] += size_[gone];
      out.merges.push_back({ida, idb, merge_distance, size_[keep]});

      refresh(keep);
      for (std::size_t k : active_) {
        if (k == keep) continue;
        if (nn_[k] == keep || nn_[k] == gone) {
          refresh(k);
        } else if (precedes(d_(k, keep), make_key(id_[k], id_[keep]), nn_dist_[k],
                            make_key(id_[k], id_[nn_[k]]))) {
          nn_[k] = keep;
          nn_dist_[k] = d_(k, keep);
        }
      }
    }
    return out;
  }

 private:
  void refresh(std::size_t s) {
    nn_[s] = kNone;
    nn_dist_[s] = std::numeric_limits<double>::infinity();
    for (std::size_t k : active_) {
      if (k == s) continue;
      if (nn_[s] == kNone ||
          precedes(d_(s, k), make_key(id_[s], id_[k]), nn_dist_[s], make_key(id_[s], id_[nn_[s]]))) {
        nn_[s] = k;
        nn_dist_[s] = d_(s, k);
      }
    }
  }

  std::size_t n_;
  LinkageMethod linkage_;
  DistanceMatrix d_;
  std::vector<std::size_t> id_;
  std::vector<std::size_t> size_;
  std::vector<std::size_t> nn_;
  std::vector<double> nn_dist_;
  std::vector<std::size_t> active_;
};

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

Dendrogram agglomerate(const DistanceMatrix& dist, LinkageMethod linkage) {
  if (dist.order() == 0) throw ValidationError("cannot cluster zero frames");
  dist.validate();
  return Agglomerator(dist, linkage).run();
}

std::vector<std::size_t> cut(const Dendrogram& dendrogram, double cutoff) {
  if (!(cutoff > 0.0)) throw ValidationError("cutoff must be positive");
  const std::size_t n = dendrogram.leaf_count;
  std::vector<std::size_t> parent(n + dendrogram.merges.size());
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t k = 0; k < dendrogram.merges.size(); ++k) {
    const auto& m = dendrogram.merges[k];
    if (!(m.distance < cutoff)) continue;
    const std::size_t node = n + k;
    parent[find_root(parent, m.cluster_a)] = node;
    parent[find_root(parent, m.cluster_b)] = node;
  }

  std::vector<std::size_t> labels(n);
  std::vector<std::size_t> label_of_root(parent.size(), kNone);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find_root(parent, i);
    if (label_of_root[root] == kNone) label_of_root[root] = next++;
    labels[i] = label_of_root[root];
  }
  return labels;
}

std::vector<std::size_t> segment(const Photostream& stream, LinkageMethod linkage, double cutoff) {
  if (!(cutoff > 0.0)) throw ValidationError("cutoff must be positive");
  return cut(agglomerate(pairwise_distances(stream), linkage), cutoff);
}

}  // namespace egosum
