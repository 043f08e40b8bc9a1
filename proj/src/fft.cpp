#include "grwlab/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "grwlab/error.hpp"

namespace grw::fft {
namespace {

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        // Planning scratch; FFTW_ESTIMATE never touches the arrays' contents.
        std::vector<std::complex<double>> scratch_in(n), scratch_out(n);
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(scratch_in.data()),
                                          reinterpret_cast<fftw_complex*>(scratch_out.data()), sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (plan == nullptr) throw Error(ErrorCode::InvalidArgument, "FFTW could not plan a transform of this length");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

void transform(std::span<const std::complex<double>> in, std::vector<std::complex<double>>& out, int sign) {
    const std::size_t n = in.size();
    out.resize(n);
    if (n == 0) return;
    std::vector<std::complex<double>> input(in.begin(), in.end());
    fftw_execute_dft(cache().get(n, sign), reinterpret_cast<fftw_complex*>(input.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& v : out) v *= scale;
}

std::vector<std::complex<double>> to_complex(std::span<const double> values) {
    return {values.begin(), values.end()};
}

}  // namespace

std::vector<std::complex<double>> forward(std::span<const std::complex<double>> in) {
    std::vector<std::complex<double>> out;
    transform(in, out, FFTW_FORWARD);
    return out;
}

std::vector<std::complex<double>> inverse(std::span<const std::complex<double>> in) {
    std::vector<std::complex<double>> out;
    transform(in, out, FFTW_BACKWARD);
    return out;
}

void forward_in_place(std::vector<std::complex<double>>& data) {
    std::vector<std::complex<double>> out;
    transform(data, out, FFTW_FORWARD);
    data.swap(out);
}

void inverse_in_place(std::vector<std::complex<double>>& data) {
    std::vector<std::complex<double>> out;
    transform(data, out, FFTW_BACKWARD);
    data.swap(out);
}

std::vector<double> cyclic_cross_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error(ErrorCode::InvalidArgument, "correlation inputs differ in length");
    auto fa = forward(to_complex(a));
    const auto fb = forward(to_complex(b));
    for (std::size_t k = 0; k < fa.size(); ++k) fa[k] = std::conj(fa[k]) * fb[k];
    inverse_in_place(fa);
    const double scale = std::sqrt(static_cast<double>(a.size()));
    std::vector<double> result(a.size());
    for (std::size_t s = 0; s < result.size(); ++s) result[s] = fa[s].real() * scale;
    return result;
}

std::vector<double> cyclic_convolution(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error(ErrorCode::InvalidArgument, "convolution inputs differ in length");
    auto fa = forward(to_complex(a));
    const auto fb = forward(to_complex(b));
    for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
    inverse_in_place(fa);
    const double scale = std::sqrt(static_cast<double>(a.size()));
    std::vector<double> result(a.size());
    for (std::size_t j = 0; j < result.size(); ++j) result[j] = fa[j].real() * scale;
    return result;
}

}  // namespace grw::fft
