#include "pathtrans/lattice.hpp"

#include <cmath>

#include "pathtrans/error.hpp"

namespace pathtrans {

namespace {
void validate(const std::vector<Interval>& intervals, const std::vector<std::size_t>& samples,
              const std::map<std::size_t, double>& frozen) {
    if (intervals.empty()) fail(ErrorKind::Config, "region needs at least one axis");
    if (samples.size() != intervals.size()) fail(ErrorKind::Config, "region needs one sample count per axis");
    for (std::size_t a = 0; a < intervals.size(); ++a) {
        const auto& iv = intervals[a];
        if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi) {
            fail(ErrorKind::Config, "region interval " + std::to_string(a) + " is empty", "region.box");
        }
        if (!frozen.contains(a) && samples[a] < 2) {
            fail(ErrorKind::Config, "region axis " + std::to_string(a) + " needs at least 2 samples", "region.samples");
        }
    }
    for (const auto& [axis, value] : frozen) {
        if (axis >= intervals.size()) fail(ErrorKind::Config, "frozen coordinate outside the chart", "region.frozen");
        if (!std::isfinite(value)) fail(ErrorKind::Config, "frozen coordinate must be finite", "region.frozen");
    }
}
}  // namespace

RegionSpec RegionSpec::box(std::vector<Interval> intervals, std::vector<std::size_t> samples) {
    validate(intervals, samples, {});
    RegionSpec r;
    r.intervals_ = std::move(intervals);
    r.samples_ = std::move(samples);
    return r;
}

RegionSpec RegionSpec::slice(std::vector<Interval> intervals, std::vector<std::size_t> samples,
                             std::map<std::size_t, double> frozen) {
    validate(intervals, samples, frozen);
    RegionSpec r;
    r.intervals_ = std::move(intervals);
    r.samples_ = std::move(samples);
    for (const auto& [axis, value] : frozen) {
        r.intervals_[axis] = Interval{value, value};
        r.samples_[axis] = 1;
    }
    r.frozen_ = std::move(frozen);
    r.slice_ = true;
    return r;
}

bool RegionSpec::contains(const Point& p) const {
    if (p.size() != dim()) return false;
    for (std::size_t a = 0; a < dim(); ++a) {
        if (p[a] < intervals_[a].lo || p[a] > intervals_[a].hi) return false;
    }
    return true;
}

Lattice::Lattice(const RegionSpec& region) {
    const std::size_t n = region.dim();
    axes_.resize(n);
    strides_.assign(n, 1);
    for (std::size_t a = 0; a < n; ++a) {
        const auto& iv = region.intervals()[a];
        const std::size_t m = region.samples()[a];
        if (m == 1) {
            axes_[a] = {iv.lo};
            continue;
        }
        for (std::size_t i = 0; i < m; ++i) {
            axes_[a].push_back(i + 1 == m ? iv.hi
                                          : iv.lo + (iv.hi - iv.lo) * static_cast<double>(i) / static_cast<double>(m - 1));
        }
    }
    for (std::size_t a = n; a-- > 0;) {
        strides_[a] = size_;
        size_ *= axes_[a].size();
    }
}

std::vector<std::size_t> Lattice::multi_index(std::size_t index) const {
    std::vector<std::size_t> out(dim());
    for (std::size_t a = 0; a < dim(); ++a) {
        out[a] = index / strides_[a];
        index %= strides_[a];
    }
    return out;
}

std::size_t Lattice::flat_index(const std::vector<std::size_t>& multi) const {
    std::size_t out = 0;
    for (std::size_t a = 0; a < dim(); ++a) out += multi[a] * strides_[a];
    return out;
}

Point Lattice::point(std::size_t index) const {
    Point p(dim());
    for (std::size_t a = 0; a < dim(); ++a) {
        p[a] = axes_[a][index / strides_[a]];
        index %= strides_[a];
    }
    return p;
}

LatticeMax lattice_max(const Lattice& lattice, const std::function<double(const Point&)>& f, Exec exec) {
    return exec == Exec::Parallel ? lattice_max_parallel(lattice, f) : lattice_max_serial(lattice, f);
}

std::vector<cd> lattice_map(const Lattice& lattice, const std::function<cd(const Point&)>& f, Exec exec) {
    return exec == Exec::Parallel ? lattice_map_parallel(lattice, f) : lattice_map_serial(lattice, f);
}

}  // namespace pathtrans
