#include <exception>
#include <limits>

#include <omp.h>

#include "pathtrans/lattice.hpp"

namespace pathtrans {

namespace {

// Exceptions must not cross the parallel region; keep the one raised at the
// lowest lattice index so the outcome matches the serial kernel.
struct FirstError {
    std::size_t index = std::numeric_limits<std::size_t>::max();
    std::exception_ptr error;

    void offer(std::size_t i, std::exception_ptr e) {
#pragma omp critical(pathtrans_first_error)
        {
            if (i < index) {
                index = i;
                error = std::move(e);
            }
        }
    }
    void rethrow() const {
        if (error) std::rethrow_exception(error);
    }
};

}  // namespace

LatticeMax lattice_max_parallel(const Lattice& lattice, const std::function<double(const Point&)>& f) {
    LatticeMax best{-1.0, 0};
    FirstError first;
    const auto n = static_cast<std::ptrdiff_t>(lattice.size());
#pragma omp parallel
    {
        LatticeMax local{-1.0, 0};
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const auto idx = static_cast<std::size_t>(i);
            try {
                const double v = f(lattice.point(idx));
                if (v > local.value || (v == local.value && idx < local.index)) local = {v, idx};
            } catch (...) {
                first.offer(idx, std::current_exception());
            }
        }
#pragma omp critical(pathtrans_lattice_max)
        {
            if (local.value > best.value || (local.value == best.value && local.index < best.index)) best = local;
        }
    }
    first.rethrow();
    if (best.value < 0.0) best.value = 0.0;
    return best;
}

std::vector<cd> lattice_map_parallel(const Lattice& lattice, const std::function<cd(const Point&)>& f) {
    std::vector<cd> out(lattice.size());
    FirstError first;
    const auto n = static_cast<std::ptrdiff_t>(lattice.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            out[idx] = f(lattice.point(idx));
        } catch (...) {
            first.offer(idx, std::current_exception());
        }
    }
    first.rethrow();
    return out;
}

}  // namespace pathtrans
