#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace tanglemap {

// Dense row-major 2D array.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, T fill = T{})
        : w_(width), h_(height), data_(static_cast<size_t>(width) * height, fill) {
        assert(width >= 0 && height >= 0);
    }

    int width() const { return w_; }
    int height() const { return h_; }
    bool empty() const { return data_.empty(); }
    size_t size() const { return data_.size(); }

    bool in_bounds(int x, int y) const { return x >= 0 && x < w_ && y >= 0 && y < h_; }

    T& at(int x, int y) {
        assert(in_bounds(x, y));
        return data_[static_cast<size_t>(y) * w_ + x];
    }
    const T& at(int x, int y) const {
        assert(in_bounds(x, y));
        return data_[static_cast<size_t>(y) * w_ + x];
    }

    T get_or(int x, int y, T fallback) const {
        return in_bounds(x, y) ? at(x, y) : fallback;
    }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.w_ == b.w_ && a.h_ == b.h_ && a.data_ == b.data_;
    }

private:
    int w_ = 0, h_ = 0;
    std::vector<T> data_;
};

using MaskGrid = Grid<uint8_t>;

} // namespace tanglemap
