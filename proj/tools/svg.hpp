#pragma once

#include <sstream>
#include <string>

#include "stokeslab/common.hpp"

namespace stokeslab::cli {

// Plot window in the complex plane, drawn with Im z pointing up.
class SvgCanvas {
public:
    SvgCanvas(cplx center, double half_width, int pixels = 800);

    // parts of the polyline far outside the window are dropped
    void polyline(const Polyline& pts, const std::string& color, double width, bool dashed,
                  const std::string& title = "");
    void dot(cplx z, double radius, const std::string& color, const std::string& title = "");
    void label(cplx z, const std::string& text, const std::string& color = "#000");
    void legend(int row, const std::string& text, const std::string& color, bool dashed, bool dot);

    std::string str() const;

private:
    double px(cplx z) const;
    double py(cplx z) const;
    bool near_window(cplx z) const;

    cplx center_;
    double half_;
    int pixels_;
    std::ostringstream body_;
};

std::string xml_escape(const std::string& s);

}  // namespace stokeslab::cli
