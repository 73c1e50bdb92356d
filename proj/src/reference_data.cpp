#include "maxpoly/reference_data.hpp"

namespace maxpoly {

namespace {

const std::vector<ReferenceOptimum>& optima()
{
    static const std::vector<ReferenceOptimum> rows = {
        {8, true, 0.72686848, 1e-6, {}, 0.0, "largest small octagon, symmetric program"},
        {10, true, 0.74913735, 1e-6, {0.21101121, 0.54864181, 0.78292327, 0.94529267}, 1e-4,
         "largest small symmetric decagon"},
        {12, true, 0.76072986, 1e-6, {0.17616079, 0.46150096, 0.67622897, 0.85319926, 0.96231045}, 1e-4,
         "largest small symmetric dodecagon"},
        {14, true, 0.76753100, 1e-5, {0.15100047, 0.39733106, 0.59117050, 0.76441599, 0.89237421, 0.97279813},
         1e-4, "largest small symmetric tetradecagon"},
        {16, true, 0.77185969, 1e-5,
         {0.13204787, 0.34840959, 0.52343183, 0.68719098, 0.81912908, 0.91836386, 0.97935563}, 1e-4,
         "largest small symmetric hexadecagon"},
        {8, false, 0.72686848, 1e-6, {0.26214172, 0.67123417, 0.67123381, 0.90909242, 0.90909213}, 1e-4,
         "largest small octagon, second relaxation"},
        {10, false, 0.74913736, 5e-6,
         {0.21101191, 0.54864468, 0.54864311, 0.78292524, 0.78292347, 0.94529290, 0.94529183}, 1e-4,
         "largest small decagon, second relaxation"},
        {12, false, 0.76072988, 5e-6,
         {0.17616131, 0.46150224, 0.46150519, 0.67623091, 0.67623301, 0.85320300, 0.85320328, 0.96231370,
          0.96231344},
         1e-4, "largest small dodecagon, second relaxation"},
    };
    return rows;
}

} // namespace

std::span<const ReferenceOptimum> reference_optima() { return optima(); }

const ReferenceOptimum* find_reference(int n, bool symmetric)
{
    for (const auto& r : optima()) {
        if (r.n == n && r.symmetric == symmetric) {
            return &r;
        }
    }
    return nullptr;
}

std::span<const ReferenceRelaxation> reference_relaxations()
{
    static const ReferenceRelaxation rows[] = {
        {10, false, 2, 2240, 113, "decagon, full program"},
        {12, false, 2, 5640, 181, "dodecagon, full program"},
        {10, true, 2, 320, 41, "decagon, symmetric program"},
        {12, true, 2, 680, 61, "dodecagon, symmetric program"},
    };
    return rows;
}

std::span<const ReferenceBound> reference_upper_bounds()
{
    static const ReferenceBound rows[] = {
        {14, 0.76893595, "analytic bound, tetradecagon bracket"},
        {16, 0.77279135, "analytic bound, hexadecagon bracket"},
    };
    return rows;
}

std::span<const ReferenceBound> reference_verified_lower_bounds()
{
    static const ReferenceBound rows[] = {
        {8, 0.72686845, "verified SDP bound, octagon"},
        {10, 0.74913721, "verified SDP bound, symmetric decagon"},
    };
    return rows;
}

} // namespace maxpoly
