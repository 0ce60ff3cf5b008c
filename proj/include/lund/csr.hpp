#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace lund {

// Minimal CSR matrix. Column indices are strictly increasing within a row.
struct Csr {
    std::size_t n = 0;  // square
    std::vector<std::size_t> rowptr;   // n + 1
    std::vector<std::uint32_t> col;
    std::vector<double> val;

    std::size_t nnz() const { return col.size(); }

    // y = M x
    void matvec(const double* x, double* y) const {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t s = rowptr[i]; s < rowptr[i + 1]; ++s)
                acc += val[s] * x[col[s]];
            y[i] = acc;
        }
    }
};

}  // namespace lund
