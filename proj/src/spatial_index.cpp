#include "impb/spatial_index.hpp"

#include <algorithm>
#include <cmath>

#include "impb/error.hpp"
#include "impb/outcome.hpp"

namespace impb {

namespace {

constexpr std::size_t kLeafSize = 8;

}  // namespace

class SpatialIndex::Tree {
public:
    struct Node {
        std::array<double, 4> lo{};
        std::array<double, 4> hi{};
        double min_weight = 0.0;
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
        std::int32_t left = -1;
        std::int32_t right = -1;
    };

    Tree(const std::vector<Point>& pts, std::vector<std::uint32_t> members, std::size_t dim)
        : members_(std::move(members)), dim_(dim) {
        nodes_.reserve(2 * members_.size() / kLeafSize + 1);
        build(pts, 0, static_cast<std::uint32_t>(members_.size()));
    }

    const std::vector<std::uint32_t>& members() const { return members_; }

    // Visits candidate points in an order that favours early pruning.
    template <typename Bound, typename Visit>
    void search(const std::vector<Point>& pts, std::span<const double> q, Bound&& bound, Visit&& visit) const {
        search_node(pts, 0, q, bound, visit);
    }

    double box_sq(std::int32_t node, std::span<const double> q) const {
        const Node& n = nodes_[static_cast<std::size_t>(node)];
        double acc = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            double gap = 0.0;
            if (q[i] < n.lo[i]) {
                gap = n.lo[i] - q[i];
            } else if (q[i] > n.hi[i]) {
                gap = q[i] - n.hi[i];
            }
            acc += gap * gap;
        }
        return acc;
    }

    double min_weight(std::int32_t node) const { return nodes_[static_cast<std::size_t>(node)].min_weight; }

private:
    std::int32_t build(const std::vector<Point>& pts, std::uint32_t begin, std::uint32_t end) {
        const auto self = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back({});
        Node n;
        n.begin = begin;
        n.end = end;
        n.lo.fill(std::numeric_limits<double>::infinity());
        n.hi.fill(-std::numeric_limits<double>::infinity());
        n.min_weight = std::numeric_limits<double>::infinity();
        for (std::uint32_t i = begin; i < end; ++i) {
            const Point& p = pts[members_[i]];
            for (std::size_t d = 0; d < dim_; ++d) {
                n.lo[d] = std::min(n.lo[d], p.c[d]);
                n.hi[d] = std::max(n.hi[d], p.c[d]);
            }
            n.min_weight = std::min(n.min_weight, p.weight);
        }
        if (end - begin > kLeafSize) {
            std::size_t axis = 0;
            double spread = -1.0;
            for (std::size_t d = 0; d < dim_; ++d) {
                if (n.hi[d] - n.lo[d] > spread) {
                    spread = n.hi[d] - n.lo[d];
                    axis = d;
                }
            }
            if (spread > 0.0) {
                const std::uint32_t mid = begin + (end - begin) / 2;
                std::nth_element(members_.begin() + begin, members_.begin() + mid, members_.begin() + end,
                                 [&](std::uint32_t a, std::uint32_t b) { return pts[a].c[axis] < pts[b].c[axis]; });
                n.left = build(pts, begin, mid);
                n.right = build(pts, mid, end);
            }
        }
        nodes_[static_cast<std::size_t>(self)] = n;
        return self;
    }

    template <typename Bound, typename Visit>
    void search_node(const std::vector<Point>& pts, std::int32_t node, std::span<const double> q, Bound& bound,
                     Visit& visit) const {
        const Node& n = nodes_[static_cast<std::size_t>(node)];
        if (n.left < 0) {
            for (std::uint32_t i = n.begin; i < n.end; ++i) visit(members_[i]);
            return;
        }
        const double lb_left = bound(box_sq(n.left, q), min_weight(n.left));
        const double lb_right = bound(box_sq(n.right, q), min_weight(n.right));
        std::int32_t first = n.left;
        std::int32_t second = n.right;
        double lb_first = lb_left;
        double lb_second = lb_right;
        if (lb_right < lb_left) {
            std::swap(first, second);
            std::swap(lb_first, lb_second);
        }
        if (!bound.prunes(lb_first)) search_node(pts, first, q, bound, visit);
        if (!bound.prunes(lb_second)) search_node(pts, second, q, bound, visit);
    }

    std::vector<std::uint32_t> members_;
    std::vector<Node> nodes_;
    std::size_t dim_;
};

SpatialIndex::SpatialIndex(std::size_t dim, double scale, std::size_t leaf_threshold)
    : dim_(dim), scale_(scale), leaf_threshold_(std::max<std::size_t>(leaf_threshold, 1)) {
    if (dim == 0 || dim > 4) throw ValidationError("spatial index supports dimensions 1..4");
    if (!(scale > 0.0)) throw ValidationError("spatial index scale must be positive");
}

SpatialIndex::~SpatialIndex() = default;
SpatialIndex::SpatialIndex(SpatialIndex&&) noexcept = default;
SpatialIndex& SpatialIndex::operator=(SpatialIndex&&) noexcept = default;

double SpatialIndex::key_of(std::span<const double> a, std::span<const double> b, double weight) const {
    return std::sqrt(squared_distance(a.first(dim_), b.first(dim_))) / scale_ * weight;
}

void SpatialIndex::insert(std::uint32_t id, std::span<const double> coords, double weight) {
    if (coords.size() < dim_) throw ValidationError("point has too few coordinates for the index");
    if (!(weight >= 0.0)) throw ValidationError("index weights must be non-negative");
    Point p;
    std::copy_n(coords.begin(), dim_, p.c.begin());
    p.id = id;
    p.weight = weight;
    buffer_.push_back(static_cast<std::uint32_t>(points_.size()));
    points_.push_back(p);
    if (buffer_.size() >= leaf_threshold_) merge_buffer();
}

void SpatialIndex::merge_buffer() {
    std::vector<std::uint32_t> carry = std::move(buffer_);
    buffer_.clear();
    for (std::size_t level = 0;; ++level) {
        if (level == levels_.size()) levels_.emplace_back();
        if (!levels_[level]) {
            levels_[level] = std::make_unique<Tree>(points_, std::move(carry), dim_);
            return;
        }
        const auto& m = levels_[level]->members();
        carry.insert(carry.end(), m.begin(), m.end());
        levels_[level].reset();
    }
}

IndexHit SpatialIndex::best(std::span<const double> query, bool use_weights) const {
    IndexHit result;
    const auto consider = [&](std::uint32_t pos) {
        const Point& p = points_[pos];
        const IndexHit h{p.id, key_of(p.c, query, use_weights ? p.weight : 1.0)};
        if (hit_less(h, result)) result = h;
    };
    struct Bound {
        const SpatialIndex* self;
        const IndexHit* current;
        bool weighted;
        double operator()(double box_sq, double min_w) const {
            return std::sqrt(box_sq) / self->scale_ * (weighted ? min_w : 1.0);
        }
        // equal keys may still hide a smaller id, so only strictly worse boxes are skipped
        bool prunes(double lb) const { return lb > current->key; }
    } bound{this, &result, use_weights};

    for (std::uint32_t pos : buffer_) consider(pos);
    for (const auto& tree : levels_) {
        if (!tree) continue;
        tree->search(points_, query, bound, consider);
    }
    return result;
}

std::vector<IndexHit> SpatialIndex::k_nearest(std::span<const double> query, std::size_t k) const {
    std::vector<IndexHit> heap;  // max-heap under hit_less
    if (k == 0) return heap;
    heap.reserve(k + 1);
    const auto consider = [&](std::uint32_t pos) {
        const Point& p = points_[pos];
        const IndexHit h{p.id, key_of(p.c, query, 1.0)};
        if (heap.size() < k) {
            heap.push_back(h);
            std::push_heap(heap.begin(), heap.end(), hit_less);
        } else if (hit_less(h, heap.front())) {
            std::pop_heap(heap.begin(), heap.end(), hit_less);
            heap.back() = h;
            std::push_heap(heap.begin(), heap.end(), hit_less);
        }
    };
    struct Bound {
        const SpatialIndex* self;
        const std::vector<IndexHit>* heap;
        std::size_t k;
        double operator()(double box_sq, double) const { return std::sqrt(box_sq) / self->scale_; }
        bool prunes(double lb) const { return heap->size() == k && lb > heap->front().key; }
    } bound{this, &heap, k};

    for (std::uint32_t pos : buffer_) consider(pos);
    for (const auto& tree : levels_) {
        if (!tree) continue;
        tree->search(points_, query, bound, consider);
    }
    std::sort_heap(heap.begin(), heap.end(), hit_less);
    return heap;
}

}  // namespace impb
