#include "erp/wavelet.hpp"

#include <algorithm>
#include <stdexcept>

namespace erp {
namespace {

// Scaling filters normalized so that sum(h) = sqrt(2). Daubechies filters are
// the extremal-phase solutions of the standard spectral factorization; the
// Symlet 5 filter is the near-symmetric length-10 solution.
const double kHaar[] = {0.7071067811865476, 0.7071067811865476};

const double kDb4[] = {
    0.23037781330885523,  0.7148465705525415,   0.6308807679295904,
    -0.02798376941698385, -0.18703481171888114, 0.030841381835986965,
    0.032883011666982945, -0.010597401784997278};

const double kDb5[] = {
    0.160102397974125,     0.6038292697974729,   0.7243085284385744,
    0.13842814590110342,   -0.24229488706619015, -0.03224486958502952,
    0.07757149384006515,   -0.006241490213011705, -0.012580751999015526,
    0.003335725285001549};

const double kDb6[] = {
    0.11154074335008017,  0.4946238903983854,    0.7511339080215775,
    0.3152503517092432,   -0.22626469396516913,  -0.12976686756709563,
    0.09750160558707936,  0.02752286553001629,   -0.031582039318031156,
    0.0005538422009938016, 0.004777257511010651, -0.00107730108499558};

const double kDb7[] = {
    0.07785205408506236,   0.39653931948230575,  0.7291320908465551,
    0.4697822874053586,    -0.14390600392910627, -0.22403618499416572,
    0.07130921926705004,   0.0806126091510659,   -0.03802993693503463,
    -0.01657454163101562,  0.012550998556013784, 0.00042957797300470274,
    -0.0018016407039998328, 0.0003537138000010399};

const double kDb8[] = {
    0.05441584224308161,    0.3128715909144659,    0.6756307362980128,
    0.5853546836548691,     -0.015829105256023893, -0.2840155429624281,
    0.00047248457399797254, 0.128747426620186,     -0.01736930100202211,
    -0.04408825393106472,   0.013981027917015516,  0.008746094047015655,
    -0.00487035299301066,   -0.000391740372995977, 0.0006754494059985568,
    -0.00011747678400228192};

const double kSym5[] = {
    0.027333068345077982, 0.029519490925774643, -0.039134249302383094,
    0.1993975339773936,   0.7234076904024206,   0.6339789634582119,
    0.016602105764522319, -0.17532808990845047, -0.021101834024758855,
    0.019538882735286728};

// bior3.9 analysis lowpass (length 20).
const double kBior39[] = {
    -0.000679744372783699, 0.002039233118351097, 0.005060319219611981,
    -0.020618912641105536, -0.014112787930175846, 0.09913478249423216,
    0.012300136269419315,  -0.32019196836077857, 0.0020500227115698858,
    0.9421257006782068,    0.9421257006782068,   0.0020500227115698858,
    -0.32019196836077857,  0.012300136269419315, 0.09913478249423216,
    -0.014112787930175846, -0.020618912641105536, 0.005060319219611981,
    0.002039233118351097,  -0.000679744372783699};

struct Entry {
    const char* name;
    const double* taps;
    std::size_t len;
    bool orthogonal;
};

const Entry kTable[] = {
    {"haar", kHaar, 2, true},       {"db4", kDb4, 8, true},
    {"db5", kDb5, 10, true},        {"db6", kDb6, 12, true},
    {"db7", kDb7, 14, true},        {"db8", kDb8, 16, true},
    {"sym5", kSym5, 10, true},      {"bior3.9", kBior39, 20, false},
};

} // namespace

const std::vector<std::string>& supported_wavelets() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& e : kTable) v.emplace_back(e.name);
        return v;
    }();
    return names;
}

WaveletSpec load_wavelet(const std::string& name) {
    std::string key = name;
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (const auto& e : kTable) {
        if (key != e.name) continue;
        WaveletSpec spec;
        spec.name = e.name;
        spec.orthogonal = e.orthogonal;
        spec.lowpass.assign(e.taps, e.taps + e.len);
        spec.highpass.resize(e.len);
        for (std::size_t n = 0; n < e.len; ++n) {
            spec.highpass[n] = (n % 2 == 0 ? 1.0 : -1.0) * spec.lowpass[n];
        }
        return spec;
    }
    throw std::invalid_argument("unknown wavelet: " + name);
}

} // namespace erp
