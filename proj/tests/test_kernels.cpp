#include <random>

#include "doctest.h"
#include "wqed/kernels.hpp"

using namespace wqed;

namespace {

std::vector<cd> random_row(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> ur(-1.0, 1.0);
    std::vector<cd> v(n);
    for (auto& x : v) x = cd(ur(rng), ur(rng));
    return v;
}

}  // namespace

TEST_SUITE("kernels") {
    TEST_CASE("dispatch reports an implementation") {
        CHECK(kernels::active().name != nullptr);
    }

#if defined(__x86_64__) || defined(_M_X64)
    TEST_CASE("scalar and avx2 agree") {
        if (!kernels::avx2_available()) return;
        std::mt19937_64 rng(7);
        for (std::size_t n : {1u, 2u, 3u, 8u, 13u, 1000u, 1001u}) {
            auto a = random_row(rng, n);
            auto b = random_row(rng, n);
            double s1 = kernels::scalar::sum_abs2(a.data(), n);
            double s2 = kernels::avx2::sum_abs2(a.data(), n);
            CHECK(s1 == doctest::Approx(s2).epsilon(1e-13));

            cd d1 = kernels::scalar::dot_conj(a.data(), b.data(), n);
            cd d2 = kernels::avx2::dot_conj(a.data(), b.data(), n);
            CHECK(std::abs(d1 - d2) < 1e-12 * (1.0 + std::abs(d1)));

            cd z(0.3, -1.2);
            std::vector<cd> o1(n), o2(n);
            kernels::scalar::scale(o1.data(), a.data(), z, n);
            kernels::avx2::scale(o2.data(), a.data(), z, n);
            for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(o1[i] - o2[i]) < 1e-14);

            auto sp = random_row(rng, n);
            auto sc = random_row(rng, n);
            cd decay(0.99, -0.02);
            kernels::scalar::march_row(o1.data(), a.data(), sp.data(), sc.data(), decay, 5e-4, n);
            kernels::avx2::march_row(o2.data(), a.data(), sp.data(), sc.data(), decay, 5e-4, n);
            for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(o1[i] - o2[i]) < 1e-14);
        }
    }
#endif

    TEST_CASE("reduction values") {
        std::vector<cd> v{{3.0, 4.0}, {1.0, 0.0}};
        CHECK(kernels::sum_abs2(v.data(), 2) == doctest::Approx(26.0));
        std::vector<cd> w{{0.0, 1.0}, {2.0, 0.0}};
        cd d = kernels::dot_conj(v.data(), w.data(), 2);
        // conj(3+4i)(i) + conj(1)(2) = (4 + 3i) + 2
        CHECK(d.real() == doctest::Approx(6.0));
        CHECK(d.imag() == doctest::Approx(3.0));
    }

    TEST_CASE("march row arithmetic") {
        std::vector<cd> prev{{1.0, 0.0}}, sp{{0.0, 2.0}}, sc{{4.0, 0.0}}, out(1);
        kernels::march_row(out.data(), prev.data(), sp.data(), sc.data(), cd(0.5, 0.5), 0.5, 1);
        // decay*(1 + 0.5*2i) + 0.5*4 = (0.5+0.5i)(1+i) + 2 = (0.5+0.5i+0.5i-0.5) + 2 = i + 2
        CHECK(out[0].real() == doctest::Approx(2.0));
        CHECK(out[0].imag() == doctest::Approx(1.0));
    }
}
