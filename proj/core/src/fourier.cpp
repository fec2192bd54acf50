#include "mfld/fourier.hpp"

#include <fftw3.h>

#include <map>
#include <tuple>

namespace mfld::fft {
namespace {

struct PlanCache {
  std::map<std::tuple<int, int, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }

  fftw_plan get(const GridSpec& g, int sign) {
    auto key = std::make_tuple(g.dim, g.points, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    // Planned on a scratch buffer; executed later via fftw_execute_dft on
    // caller arrays. FFTW_UNALIGNED keeps that valid for any allocation.
    std::vector<cplx> scratch(g.size());
    auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = nullptr;
    if (g.dim == 1) {
      plan = fftw_plan_dft_1d(g.points, ptr, ptr, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    } else {
      plan = fftw_plan_dft_2d(g.points, g.points, ptr, ptr, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    plans.emplace(key, plan);
    return plan;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void execute(const GridSpec& g, int sign, const cplx* in, cplx* out) {
  fftw_plan plan = cache().get(g, sign);
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in));
  auto* dst = reinterpret_cast<fftw_complex*>(out);
  fftw_execute_dft(plan, src, dst);
}

}  // namespace

void forward(const GridSpec& g, const cplx* in, cplx* out) {
  execute(g, FFTW_FORWARD, in, out);
}

void inverse(const GridSpec& g, const cplx* in, cplx* out) {
  execute(g, FFTW_BACKWARD, in, out);
}

}  // namespace mfld::fft
