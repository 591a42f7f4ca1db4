// Thin wrapper over the LAPACK banded solver for the block-banded
// Newton systems (interleaved mode components per grid node).
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

extern "C" void dgbsv_(const int* n, const int* kl, const int* ku, const int* nrhs,
                       double* ab, const int* ldab, int* ipiv, double* b,
                       const int* ldb, int* info);

namespace breatherlab {

struct SingularMatrixError : std::runtime_error {
    explicit SingularMatrixError(int pivot)
        : std::runtime_error("banded solve: exactly singular at pivot " + std::to_string(pivot)) {}
};

/// General banded matrix in LAPACK gb storage (column-major, with the
/// extra kl rows of fill-in space dgbsv requires).
class BandedMatrix {
  public:
    BandedMatrix(int n, int kl, int ku)
        : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1), ab_(static_cast<size_t>(ldab_) * n, 0.0) {}

    int size() const { return n_; }

    void add(int i, int j, double v) {
        ab_[static_cast<size_t>(j) * ldab_ + (kl_ + ku_ + i - j)] += v;
    }
    void set(int i, int j, double v) {
        ab_[static_cast<size_t>(j) * ldab_ + (kl_ + ku_ + i - j)] = v;
    }
    bool in_band(int i, int j) const {
        return i >= 0 && j >= 0 && i < n_ && j < n_ && j - i <= ku_ && i - j <= kl_;
    }
    double get(int i, int j) const {
        return ab_[static_cast<size_t>(j) * ldab_ + (kl_ + ku_ + i - j)];
    }

    /// Matrix-vector product. Only valid before solve() overwrites the
    /// storage with the LU factors.
    std::vector<double> apply(const std::vector<double>& v) const {
        std::vector<double> out(n_, 0.0);
        for (int j = 0; j < n_; ++j) {
            const int ilo = j - ku_ < 0 ? 0 : j - ku_;
            const int ihi = j + kl_ >= n_ ? n_ - 1 : j + kl_;
            const double vj = v[j];
            for (int i = ilo; i <= ihi; ++i) out[i] += get(i, j) * vj;
        }
        return out;
    }

    /// Factor in place and solve for one right-hand side.
    void solve(std::vector<double>& rhs) {
        if (static_cast<int>(rhs.size()) != n_) throw std::invalid_argument("banded solve: rhs size mismatch");
        std::vector<int> ipiv(n_);
        const int nrhs = 1;
        int info = 0;
        dgbsv_(&n_, &kl_, &ku_, &nrhs, ab_.data(), &ldab_, ipiv.data(), rhs.data(), &n_, &info);
        if (info > 0) throw SingularMatrixError(info);
        if (info < 0) throw std::invalid_argument("banded solve: bad argument " + std::to_string(-info));
    }

  private:
    int n_, kl_, ku_, ldab_;
    std::vector<double> ab_;
};

}  // namespace breatherlab
