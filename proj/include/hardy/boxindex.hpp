#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "hardy/domain.hpp"

namespace hardy {

// Bounding-volume hierarchy over closed boxes; queries report indices of boxes meeting a point or box.
class BoxIndex {
public:
    BoxIndex() = default;
    explicit BoxIndex(std::vector<Box> boxes) : boxes_(std::move(boxes)) {
        order_.resize(boxes_.size());
        std::iota(order_.begin(), order_.end(), 0);
        if (!boxes_.empty()) build(0, order_.size());
    }

    size_t size() const { return boxes_.size(); }
    const Box& box(size_t i) const { return boxes_[i]; }

    template <class F>
    void query_point(const double* x, F&& f, double tol = 0.0) const {
        if (nodes_.empty()) return;
        visit(0, [&](const Box& b) { return b.contains(x, tol); }, f);
    }
    template <class F>
    void query_box(const Box& q, F&& f) const {
        if (nodes_.empty()) return;
        visit(0, [&](const Box& b) { return b.intersects(q); }, f);
    }

private:
    struct Node {
        Box bound;
        size_t begin, end;
        int left = -1, right = -1;
    };

    int build(size_t b, size_t e) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back({boxes_[order_[b]], b, e});
        Box bound = boxes_[order_[b]];
        for (size_t i = b + 1; i < e; ++i) bound = bound.hull(boxes_[order_[i]]);
        nodes_[id].bound = bound;
        if (e - b <= 4) return id;
        int axis = 0;
        double ext = -1.0;
        for (int j = 0; j < bound.dim(); ++j)
            if (bound.hi[j] - bound.lo[j] > ext) {
                ext = bound.hi[j] - bound.lo[j];
                axis = j;
            }
        const size_t m = (b + e) / 2;
        std::nth_element(order_.begin() + b, order_.begin() + m, order_.begin() + e, [&](size_t i, size_t k) {
            return boxes_[i].lo[axis] + boxes_[i].hi[axis] < boxes_[k].lo[axis] + boxes_[k].hi[axis];
        });
        const int l = build(b, m);
        const int r = build(m, e);
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
    }

    template <class Hit, class F>
    void visit(int id, Hit&& hit, F& f) const {
        const Node& n = nodes_[id];
        if (!hit(n.bound)) return;
        if (n.left < 0) {
            for (size_t i = n.begin; i < n.end; ++i)
                if (hit(boxes_[order_[i]])) f(order_[i]);
            return;
        }
        visit(n.left, hit, f);
        visit(n.right, hit, f);
    }

    std::vector<Box> boxes_;
    std::vector<size_t> order_;
    std::vector<Node> nodes_;
};

}  // namespace hardy
