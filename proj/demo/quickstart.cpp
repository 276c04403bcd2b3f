// Compares plain and median-of-means MMD estimates on a sample with a few
// gross outliers.

#include "monk/monk.hpp"

#include <cstdio>

int main()
{
    const auto kernel = monk::Kernel::polynomial(2, 1.0);
    const auto xs = monk::sample_gaussian(0.2, 0.7, 1000, 1);
    const auto ys = monk::sample_gaussian(0.9, 0.4, 1000, 2);
    const auto [dirty_x, dirty_y] = monk::contaminate(xs, ys, {5, 2000.0, 4000.0});

    std::printf("true MMD       %.4f\n", monk::analytic_mmd_gaussian(kernel, 0.2, 0.7, 0.9, 0.4));

    monk::EstimatorOptions opt;
    opt.q = 11;
    opt.remainder = monk::RemainderPolicy::drop_remainder;
    for (auto method : {monk::Estimator::vstat, monk::Estimator::ustat, monk::Estimator::monk_bcd,
                        monk::Estimator::monk_bcd_fast}) {
        opt.method = method;
        const double clean = monk::estimate(kernel, xs, ys, opt, 7).value;
        const double dirty = monk::estimate(kernel, dirty_x, dirty_y, opt, 7).value;
        std::printf("%-14s clean %10.4f   with outliers %14.4f\n", std::string(monk::estimator_name(method)).c_str(),
                    clean, dirty);
    }
}
