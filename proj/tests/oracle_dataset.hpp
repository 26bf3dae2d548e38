#pragma once

// Test support: far-field datasets for disk scatterers filled from the
// separation-of-variables oracle instead of the boundary-integral solver.
// Keeps inversion tests independent of the solver path they often check.

#include "echoform/analytic_oracle.hpp"
#include "echoform/data_synthesis.hpp"

namespace echoform::testing {

inline FarFieldDataset oracle_disk_dataset(const DiskSpec& spec, const DirectionPairSet& pairs,
                                           const FrequencyGrid& grid) {
    FarFieldDataset out{pairs,
                        grid,
                        "disk:a=" + std::to_string(spec.radius),
                        spec.bc,
                        spec.bc == BoundaryKind::Impedance ? std::to_string(spec.lambda) : "",
                        0.0,
                        0,
                        {}};
    out.values.assign(out.record_count(), Complex(0.0, 0.0));
    for (const auto& pr : pairs.pairs)
        for (int m = 0; m <= grid.M; ++m)
            out.values[out.record_index(pr.dir_index, pr.rot_index, m)] =
                disk_far_field(spec, pr.xhat, pr.theta, grid.k(m));
    return out;
}

}  // namespace echoform::testing
