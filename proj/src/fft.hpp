#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>

namespace hdtele::detail {

// FFTW's planner is not re-entrant; execution on distinct plans is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

class FftwBuffer {
public:
    explicit FftwBuffer(std::size_t n)
        : data_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))), size_(n) {
        if (!data_) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(data_); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;

    fftw_complex* raw() noexcept { return data_; }
    std::complex<double>* data() noexcept { return reinterpret_cast<std::complex<double>*>(data_); }
    std::complex<double>& operator[](std::size_t i) noexcept { return data()[i]; }
    std::size_t size() const noexcept { return size_; }

private:
    fftw_complex* data_;
    std::size_t size_;
};

// In-place plan bound to one buffer.
class FftwPlan {
public:
    FftwPlan(FftwBuffer& buf, int rank_n0, int rank_n1, int sign) : buf_(buf) {
        std::lock_guard lock(fftw_planner_mutex());
        if (rank_n1 > 0)
            plan_ = fftw_plan_dft_2d(rank_n0, rank_n1, buf.raw(), buf.raw(), sign, FFTW_ESTIMATE);
        else
            plan_ = fftw_plan_dft_1d(rank_n0, buf.raw(), buf.raw(), sign, FFTW_ESTIMATE);
    }
    ~FftwPlan() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
    }
    FftwPlan(const FftwPlan&) = delete;
    FftwPlan& operator=(const FftwPlan&) = delete;

    void execute() { fftw_execute(plan_); }

private:
    FftwBuffer& buf_;
    fftw_plan plan_ = nullptr;
};

}  // namespace hdtele::detail
