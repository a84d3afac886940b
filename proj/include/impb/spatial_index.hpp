#ifndef IMPB_SPATIAL_INDEX_HPP
#define IMPB_SPATIAL_INDEX_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <vector>

namespace impb {

/// Result of an index query: the stored id and its key value.
struct IndexHit {
    std::uint32_t id = std::numeric_limits<std::uint32_t>::max();
    double key = std::numeric_limits<double>::infinity();

    bool valid() const { return id != std::numeric_limits<std::uint32_t>::max(); }
};

/// Orders hits by key, then by id (earliest inserted wins ties).
inline bool hit_less(const IndexHit& a, const IndexHit& b) {
    return a.key < b.key || (a.key == b.key && a.id < b.id);
}

/// Incremental nearest-neighbour index over points of dimension <= 4.
///
/// Each point carries a non-negative weight; queries minimize
///     key = (sqrt(squared distance) / scale) * weight
/// with ties broken by insertion id, so results coincide bit for bit with a
/// linear scan computing the same expression. Points land in an unindexed
/// buffer first; once `leaf_threshold` points accumulate they are merged into
/// static kd-trees of doubling size (logarithmic method).
class SpatialIndex {
public:
    SpatialIndex(std::size_t dim, double scale, std::size_t leaf_threshold = 64);
    ~SpatialIndex();
    SpatialIndex(SpatialIndex&&) noexcept;
    SpatialIndex& operator=(SpatialIndex&&) noexcept;

    void insert(std::uint32_t id, std::span<const double> coords, double weight = 1.0);

    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    std::size_t dim() const { return dim_; }

    /// Minimum of the weighted key. With `use_weights == false` every weight is 1.
    IndexHit best(std::span<const double> query, bool use_weights) const;

    /// The k smallest unweighted keys, ascending.
    std::vector<IndexHit> k_nearest(std::span<const double> query, std::size_t k) const;

    /// Computes the key the same way queries do.
    double key_of(std::span<const double> a, std::span<const double> b, double weight) const;

private:
    struct Point {
        std::array<double, 4> c{};
        std::uint32_t id = 0;
        double weight = 1.0;
    };
    class Tree;

    void merge_buffer();

    std::size_t dim_;
    double scale_;
    std::size_t leaf_threshold_;
    std::vector<Point> points_;
    std::vector<std::uint32_t> buffer_;           // positions in points_
    std::vector<std::unique_ptr<Tree>> levels_;   // level i holds leaf_threshold * 2^i points or nothing
};

}  // namespace impb

#endif  // IMPB_SPATIAL_INDEX_HPP
