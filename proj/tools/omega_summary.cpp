// Builds an engine for a pinning map and prints omega, Omega and a few
// Harris-function values with their error bounds.
//
//   omega_summary 1/4 0 3/4
#include <iostream>
#include <string>
#include <vector>

#include "oscamp/oscamp.hpp"

int main(int argc, char** argv)
{
    using namespace oscamp;
    using R = mp_real;

    std::vector<std::string> weights{"1/10", "0", "9/10"};
    if (argc > 1) weights.assign(argv + 1, argv + argc);

    try {
        precision_scope scope(digits_from_environment());
        const auto map = PinningMap<R>::from_strings(weights);
        const OscillationEngine<R> engine(map);

        const auto& omega = engine.omega_summary();
        std::cout << "gamma        " << engine.gamma().str(20) << "\n";
        std::cout << "omega mean   " << omega.mean.value.str(20) << " +- " << omega.mean.err.str(2) << "\n";
        for (const auto& h : omega.harmonics)
            std::cout << "omega g" << h.n << "     " << h.amplitude.value.str(10) << " +- " << h.amplitude.err.str(2) << "\n";
        std::cout << "pointwise    " << engine.max_pointwise_error().str(2) << "\n";

        const auto amp = engine.amplitude(256, 4);
        std::cout << "Omega mean   " << amp.fourier.mean.value.str(20) << " +- " << amp.fourier.mean.err.str(2) << "\n";
        std::cout << "oscillation  " << amp.oscillation.value.str(6) << " +- " << amp.oscillation.err.str(2) << "\n";

        for (const char* s : {"0.5", "1", "2"}) {
            const auto psi = psi_boettcher(engine, R(s));
            std::cout << "psi(" << s << ")" << std::string(7 - std::string(s).size(), ' ') << psi.value.str(20)
                      << " +- " << psi.err.str(2) << "\n";
        }
    } catch (const error& e) {
        std::cerr << e.code() << ": " << e.what() << "\n";
        return 2;
    }
}
