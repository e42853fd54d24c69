#pragma once

#include <functional>
#include <map>
#include <vector>

#include "pathtrans/expr.hpp"
#include "pathtrans/geometry.hpp"

namespace pathtrans {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Sampled region of the chart: a box (every axis free) or a coordinate
/// slice (some axes frozen to constants).
class RegionSpec {
public:
    static RegionSpec box(std::vector<Interval> intervals, std::vector<std::size_t> samples);
    static RegionSpec slice(std::vector<Interval> intervals, std::vector<std::size_t> samples,
                            std::map<std::size_t, double> frozen);

    std::size_t dim() const { return intervals_.size(); }
    bool is_slice() const { return slice_; }
    const std::vector<Interval>& intervals() const { return intervals_; }
    const std::vector<std::size_t>& samples() const { return samples_; }
    const std::map<std::size_t, double>& frozen() const { return frozen_; }
    bool is_free(std::size_t axis) const { return !frozen_.contains(axis); }

    bool contains(const Point& p) const;

private:
    RegionSpec() = default;
    std::vector<Interval> intervals_;
    std::vector<std::size_t> samples_;
    std::map<std::size_t, double> frozen_;
    bool slice_ = false;
};

/// Tensor-product sample lattice over a region; the last axis varies fastest.
class Lattice {
public:
    explicit Lattice(const RegionSpec& region);

    std::size_t size() const { return size_; }
    std::size_t dim() const { return axes_.size(); }
    const std::vector<double>& axis(std::size_t a) const { return axes_[a]; }

    Point point(std::size_t index) const;
    std::vector<std::size_t> multi_index(std::size_t index) const;
    std::size_t flat_index(const std::vector<std::size_t>& multi) const;

private:
    std::vector<std::vector<double>> axes_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 1;
};

enum class Exec { Serial, Parallel };

struct LatticeMax {
    double value = 0.0;
    std::size_t index = 0;
};

// Lattice kernels. The serial versions are the reference; the OpenMP versions
// must agree with them bit for bit (ties resolve to the lowest index, and the
// first failing point by index is the one whose error propagates).

LatticeMax lattice_max_serial(const Lattice& lattice, const std::function<double(const Point&)>& f);
LatticeMax lattice_max_parallel(const Lattice& lattice, const std::function<double(const Point&)>& f);
LatticeMax lattice_max(const Lattice& lattice, const std::function<double(const Point&)>& f, Exec exec);

std::vector<cd> lattice_map_serial(const Lattice& lattice, const std::function<cd(const Point&)>& f);
std::vector<cd> lattice_map_parallel(const Lattice& lattice, const std::function<cd(const Point&)>& f);
std::vector<cd> lattice_map(const Lattice& lattice, const std::function<cd(const Point&)>& f, Exec exec);

}  // namespace pathtrans
