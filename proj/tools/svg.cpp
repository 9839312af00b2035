#include "svg.hpp"

#include <cmath>
#include <cstdio>

namespace stokeslab::cli {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

SvgCanvas::SvgCanvas(cplx center, double half_width, int pixels)
    : center_(center), half_(half_width), pixels_(pixels) {}

double SvgCanvas::px(cplx z) const { return (z.real() - center_.real() + half_) / (2 * half_) * pixels_; }
double SvgCanvas::py(cplx z) const { return (center_.imag() + half_ - z.imag()) / (2 * half_) * pixels_; }

bool SvgCanvas::near_window(cplx z) const {
    return std::abs(z.real() - center_.real()) < 3 * half_ && std::abs(z.imag() - center_.imag()) < 3 * half_;
}

void SvgCanvas::polyline(const Polyline& pts, const std::string& color, double width, bool dashed,
                         const std::string& title) {
    std::string run;
    int count = 0;
    auto flush = [&] {
        if (count >= 2) {
            body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << num(width) << '"';
            if (dashed) body_ << " stroke-dasharray=\"6,4\"";
            body_ << " points=\"" << run << "\">";
            if (!title.empty()) body_ << "<title>" << xml_escape(title) << "</title>";
            body_ << "</polyline>\n";
        }
        run.clear();
        count = 0;
    };
    for (cplx z : pts) {
        if (!near_window(z) || !std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            flush();
            continue;
        }
        run += (count ? " " : "") + num(px(z)) + "," + num(py(z));
        ++count;
    }
    flush();
}

void SvgCanvas::dot(cplx z, double radius, const std::string& color, const std::string& title) {
    if (!near_window(z)) return;
    body_ << "<circle cx=\"" << num(px(z)) << "\" cy=\"" << num(py(z)) << "\" r=\"" << num(radius) << "\" fill=\""
          << color << "\">";
    if (!title.empty()) body_ << "<title>" << xml_escape(title) << "</title>";
    body_ << "</circle>\n";
}

void SvgCanvas::label(cplx z, const std::string& text, const std::string& color) {
    if (!near_window(z)) return;
    body_ << "<text x=\"" << num(px(z) + 6) << "\" y=\"" << num(py(z) - 6) << "\" font-size=\"14\" fill=\"" << color
          << "\">" << xml_escape(text) << "</text>\n";
}

void SvgCanvas::legend(int row, const std::string& text, const std::string& color, bool dashed, bool as_dot) {
    const double y = 20 + 18 * row;
    if (as_dot)
        body_ << "<circle cx=\"22\" cy=\"" << num(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    else
        body_ << "<line x1=\"12\" y1=\"" << num(y) << "\" x2=\"32\" y2=\"" << num(y) << "\" stroke=\"" << color
              << "\" stroke-width=\"2\"" << (dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    body_ << "<text x=\"40\" y=\"" << num(y + 4) << "\" font-size=\"13\">" << xml_escape(text) << "</text>\n";
}

std::string SvgCanvas::str() const {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels_ << "\" height=\"" << pixels_
        << "\" viewBox=\"0 0 " << pixels_ << ' ' << pixels_ << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // coordinate axes
    const cplx lo = center_ - cplx(half_, half_), hi = center_ + cplx(half_, half_);
    if (lo.imag() < 0 && hi.imag() > 0)
        out << "<line x1=\"0\" y1=\"" << num(py(0.0)) << "\" x2=\"" << pixels_ << "\" y2=\"" << num(py(0.0))
            << "\" stroke=\"#bbb\" stroke-width=\"1\"/>\n";
    if (lo.real() < 0 && hi.real() > 0)
        out << "<line x1=\"" << num(px(0.0)) << "\" y1=\"0\" x2=\"" << num(px(0.0)) << "\" y2=\"" << pixels_
            << "\" stroke=\"#bbb\" stroke-width=\"1\"/>\n";
    out << body_.str() << "</svg>\n";
    return out.str();
}

}  // namespace stokeslab::cli
