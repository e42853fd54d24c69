#include "pathtrans/lattice.hpp"

namespace pathtrans {

LatticeMax lattice_max_serial(const Lattice& lattice, const std::function<double(const Point&)>& f) {
    LatticeMax best{-1.0, 0};
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        const double v = f(lattice.point(i));
        if (v > best.value) best = {v, i};
    }
    if (best.value < 0.0) best.value = 0.0;
    return best;
}

std::vector<cd> lattice_map_serial(const Lattice& lattice, const std::function<cd(const Point&)>& f) {
    std::vector<cd> out(lattice.size());
    for (std::size_t i = 0; i < lattice.size(); ++i) out[i] = f(lattice.point(i));
    return out;
}

}  // namespace pathtrans
