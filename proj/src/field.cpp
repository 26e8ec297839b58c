#include "hupa/field.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hupa/random.hpp"
#include "hupa/tessellation.hpp"

namespace hupa {

BinaryField::BinaryField(BoxDomain box, std::size_t nx, std::size_t ny, std::vector<std::uint8_t> dark,
                         std::string provenance)
    : box_(box), nx_(nx), ny_(ny), dark_(std::move(dark)), provenance_(std::move(provenance)) {
    if (box_.dim() != 2) throw InvalidArgument("binary fields are 2D only");
    if (nx_ < 1 || ny_ < 1) throw InvalidArgument("field needs at least one pixel per axis");
    if (dark_.size() != nx_ * ny_) throw InvalidArgument("pixel buffer size does not match the grid");
    const double hx = box_.length(0) / static_cast<double>(nx_), hy = box_.length(1) / static_cast<double>(ny_);
    if (std::fabs(hx - hy) > 1e-12 * std::max(hx, hy))
        throw InvalidArgument("pixels must be square: h_x=" + std::to_string(hx) + " h_y=" + std::to_string(hy));
    h_ = hx;
    row_prefix_.resize((nx_ + 1) * ny_);
    for (std::size_t j = 0; j < ny_; ++j) {
        std::uint32_t* pre = &row_prefix_[j * (nx_ + 1)];
        pre[0] = 0;
        for (std::size_t i = 0; i < nx_; ++i) {
            dark_[j * nx_ + i] = dark_[j * nx_ + i] ? 1 : 0;
            pre[i + 1] = pre[i] + dark_[j * nx_ + i];
        }
        dark_count_ += pre[nx_];
    }
    dark_fraction_ = static_cast<double>(dark_count_) / static_cast<double>(nx_ * ny_);
}

std::size_t BinaryField::dark_in_row(std::size_t j, long i0, std::size_t count) const noexcept {
    const std::uint32_t* pre = &row_prefix_[j * (nx_ + 1)];
    const long n = static_cast<long>(nx_);
    std::size_t total = 0;
    while (count >= nx_) {
        total += pre[nx_];
        count -= nx_;
    }
    const auto s = static_cast<std::size_t>(((i0 % n) + n) % n);
    if (s + count <= nx_) return total + pre[s + count] - pre[s];
    return total + (pre[nx_] - pre[s]) + pre[s + count - nx_];
}

WindowTally field_window_tally(const BinaryField& field, const Vec& center, double R) {
    const BoxDomain& box = field.box();
    if (!(R > 0.0) || !(R < box.min_length() / 2.0))
        throw InvalidArgument("window radius " + std::to_string(R) + " outside (0, " +
                              std::to_string(box.min_length() / 2.0) + "): window too large for the periodic box");
    const double h = field.pixel_size();
    const double Rin = R + 1e-12;
    const double cx = center[0], cy = center[1];
    const long j0 = static_cast<long>(std::ceil((cy - Rin) / h - 0.5));
    const long j1 = static_cast<long>(std::floor((cy + Rin) / h - 0.5));
    const long ny = static_cast<long>(field.ny());
    WindowTally tally;
    for (long j = j0; j <= j1; ++j) {
        const double dy = (static_cast<double>(j) + 0.5) * h - cy;
        const double rem = Rin * Rin - dy * dy;
        if (rem < 0.0) continue;
        const double half = std::sqrt(rem);
        const long i0 = static_cast<long>(std::ceil((cx - half) / h - 0.5));
        const long i1 = static_cast<long>(std::floor((cx + half) / h - 0.5));
        if (i1 < i0) continue;
        const auto count = static_cast<std::size_t>(i1 - i0 + 1);
        const auto jw = static_cast<std::size_t>(((j % ny) + ny) % ny);
        tally.pixels += count;
        tally.dark += field.dark_in_row(jw, i0, count);
    }
    return tally;
}

double field_dark_fraction_in_window(const BinaryField& field, const Vec& center, double R) {
    const WindowTally t = field_window_tally(field, center, R);
    if (t.pixels == 0) throw DegenerateInput("window contains no pixel centers; use a larger radius");
    return static_cast<double>(t.dark) / static_cast<double>(t.pixels);
}

namespace {

class Cursor {
  public:
    explicit Cursor(const std::string& b) : b_(b) {}

    std::size_t pos() const noexcept { return pos_; }
    std::size_t token_start() const noexcept { return token_start_; }
    bool done() const noexcept { return pos_ >= b_.size(); }

    void skip_space_and_comments() {
        while (pos_ < b_.size()) {
            const unsigned char c = static_cast<unsigned char>(b_[pos_]);
            if (c == '#') {
                while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
            } else if (std::isspace(c)) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    long read_uint(const char* what) {
        skip_space_and_comments();
        const std::size_t start = pos_;
        token_start_ = start;
        long v = 0;
        while (pos_ < b_.size() && std::isdigit(static_cast<unsigned char>(b_[pos_]))) {
            v = v * 10 + (b_[pos_] - '0');
            if (v > 1'000'000'000L) throw ParseError(std::string(what) + " too large", ParseError::Where::byte, start);
            ++pos_;
        }
        if (pos_ == start) {
            if (done()) throw ParseError(std::string("truncated payload: expected ") + what, ParseError::Where::byte, pos_);
            throw ParseError(std::string("expected ") + what, ParseError::Where::byte, pos_);
        }
        return v;
    }

    /// Single ASCII bit for P1, whose digits need not be separated.
    int read_bit() {
        skip_space_and_comments();
        if (done()) throw ParseError("truncated payload: expected pixel", ParseError::Where::byte, pos_);
        const char c = b_[pos_];
        if (c != '0' && c != '1') throw ParseError("expected 0 or 1", ParseError::Where::byte, pos_);
        ++pos_;
        return c - '0';
    }

    unsigned char byte() {
        if (done()) throw ParseError("truncated payload", ParseError::Where::byte, pos_);
        return static_cast<unsigned char>(b_[pos_++]);
    }

    void skip_single_whitespace() {
        if (done() || !std::isspace(static_cast<unsigned char>(b_[pos_])))
            throw ParseError("expected whitespace before binary payload", ParseError::Where::byte, pos_);
        ++pos_;
    }

  private:
    const std::string& b_;
    std::size_t pos_ = 0;
    std::size_t token_start_ = 0;
};

std::optional<std::pair<double, double>> parse_sidecar(const std::string& text) {
    const auto at = text.find("lengths=");
    if (at == std::string::npos) throw ParseError("sidecar lacks 'lengths='", ParseError::Where::byte, 0);
    std::istringstream in(text.substr(at + 8));
    double lx = 0.0, ly = 0.0;
    char comma = 0;
    if (!(in >> lx >> comma >> ly) || comma != ',' || !(lx > 0.0) || !(ly > 0.0))
        throw ParseError("malformed sidecar lengths", ParseError::Where::byte, at + 8);
    return std::make_pair(lx, ly);
}

}  // namespace

BinaryField parse_field(const std::string& bytes, const LoadFieldOptions& options,
                        const std::optional<std::string>& sidecar) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] < '1' || bytes[1] > '5' || bytes[1] == '3')
        throw ParseError("malformed magic number (expected P1, P2, P4 or P5)", ParseError::Where::byte, 0);
    const char kind = bytes[1];
    const bool gray = kind == '2' || kind == '5';
    if (gray && !options.threshold) throw InvalidArgument("PGM input requires a threshold");
    if (options.threshold && (*options.threshold < 0 || *options.threshold > 255))
        throw InvalidArgument("threshold must lie in [0, 255]");

    Cursor cur(bytes);
    cur.byte();
    cur.byte();
    const long w = cur.read_uint("width");
    const long hgt = cur.read_uint("height");
    if (w < 1 || hgt < 1) throw ParseError("image must be at least 1x1", ParseError::Where::byte, cur.pos());
    long maxval = 1;
    if (gray) {
        const std::size_t at = cur.pos();
        maxval = cur.read_uint("maxval");
        if (maxval < 1 || maxval > 255) throw ParseError("maxval must lie in [1, 255]", ParseError::Where::byte, at);
    }
    const auto nx = static_cast<std::size_t>(w), ny = static_cast<std::size_t>(hgt);
    std::vector<std::uint8_t> dark(nx * ny, 0);
    auto set = [&](std::size_t row, std::size_t col, bool d) { dark[(ny - 1 - row) * nx + col] = d ? 1 : 0; };

    if (kind == '4' || kind == '5') cur.skip_single_whitespace();
    for (std::size_t r = 0; r < ny; ++r) {
        if (kind == '4') {
            for (std::size_t byte = 0; byte < (nx + 7) / 8; ++byte) {
                const unsigned char b = cur.byte();
                for (int bit = 0; bit < 8; ++bit) {
                    const std::size_t c = byte * 8 + static_cast<std::size_t>(bit);
                    if (c < nx) set(r, c, (b >> (7 - bit)) & 1);
                }
            }
            continue;
        }
        for (std::size_t c = 0; c < nx; ++c) {
            switch (kind) {
                case '1': set(r, c, cur.read_bit() == 1); break;
                case '2': {
                    const long v = cur.read_uint("gray value");
                    const std::size_t at = cur.token_start();
                    if (v > maxval) throw ParseError("gray value exceeds maxval", ParseError::Where::byte, at);
                    set(r, c, v <= *options.threshold);
                    break;
                }
                default: {
                    const std::size_t at = cur.pos();
                    const unsigned char v = cur.byte();
                    if (v > maxval) throw ParseError("gray value exceeds maxval", ParseError::Where::byte, at);
                    set(r, c, v <= *options.threshold);
                    break;
                }
            }
        }
    }

    double lx = static_cast<double>(nx), ly = static_cast<double>(ny);
    std::string prov = std::string("image P") + kind + " " + std::to_string(nx) + "x" + std::to_string(ny);
    if (options.pixel_size) {
        if (!(*options.pixel_size > 0.0)) throw InvalidArgument("pixel size must be positive");
        lx *= *options.pixel_size;
        ly *= *options.pixel_size;
        prov += " pixel_size=" + format_decimal(*options.pixel_size);
    } else if (sidecar) {
        const auto lengths = parse_sidecar(*sidecar);
        const double hx = lengths->first / nx, hy = lengths->second / ny;
        if (std::fabs(hx - hy) > 1e-12 * std::max(hx, hy))
            throw ParseError("sidecar lengths give nonsquare pixels", ParseError::Where::byte, sidecar->find("lengths="));
        lx = lengths->first;
        ly = lengths->second;
        prov += " sidecar lengths";
    }
    return BinaryField(BoxDomain{lx, ly}, nx, ny, std::move(dark), prov);
}

BinaryField load_field(const std::filesystem::path& path, const LoadFieldOptions& options) {
    auto slurp = [](const std::filesystem::path& p) -> std::optional<std::string> {
        std::ifstream in(p, std::ios::binary);
        if (!in) return std::nullopt;
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const auto bytes = slurp(path);
    if (!bytes) throw IoError("cannot open image '" + path.string() + "'");
    std::optional<std::string> sidecar = slurp(path.string() + ".hupa");
    if (!sidecar) {
        auto alt = path;
        alt.replace_extension(".hupa");
        sidecar = slurp(alt);
    }
    return parse_field(*bytes, options, sidecar);
}

std::string encode_pbm(const BinaryField& field) {
    std::string out = "P4\n" + std::to_string(field.nx()) + " " + std::to_string(field.ny()) + "\n";
    const std::size_t stride = (field.nx() + 7) / 8;
    for (std::size_t r = 0; r < field.ny(); ++r) {
        const std::size_t j = field.ny() - 1 - r;
        for (std::size_t byte = 0; byte < stride; ++byte) {
            unsigned char b = 0;
            for (int bit = 0; bit < 8; ++bit) {
                const std::size_t i = byte * 8 + static_cast<std::size_t>(bit);
                if (i < field.nx() && field.dark(i, j)) b |= static_cast<unsigned char>(1u << (7 - bit));
            }
            out.push_back(static_cast<char>(b));
        }
    }
    return out;
}

void save_field(const BinaryField& field, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write image '" + path.string() + "'");
    out << encode_pbm(field);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

BinaryField rasterize_tessellation(const Tessellation& tess, std::size_t pixels_per_axis, double wall_halfwidth) {
    if (pixels_per_axis < 16) throw InvalidArgument("pixels_per_axis must be >= 16");
    if (!(wall_halfwidth >= 0.0)) throw InvalidArgument("wall half-width must be >= 0");
    const BoxDomain& box = tess.box();
    const std::size_t nx = pixels_per_axis;
    const double h = box.length(0) / static_cast<double>(nx);
    const double rows = box.length(1) / h;
    const double ny_r = std::round(rows);
    if (std::fabs(rows - ny_r) > 1e-9 * rows)
        throw InvalidArgument("box aspect ratio does not give a whole number of square pixel rows");
    const auto ny = static_cast<std::size_t>(ny_r);
    const long lnx = static_cast<long>(nx), lny = static_cast<long>(ny);
    std::vector<std::uint8_t> dark(nx * ny, 0);
    const double w = wall_halfwidth;

    for (const VoronoiCell& cell : tess.cells()) {
        const std::size_t m = cell.loop.size();
        for (std::size_t k = 0; k < m; ++k) {
            const Vec& a = cell.loop[k];
            const Vec& b = cell.loop[(k + 1) % m];
            const double ex = b[0] - a[0], ey = b[1] - a[1];
            const double len2 = ex * ex + ey * ey;
            const long i0 = static_cast<long>(std::floor((std::min(a[0], b[0]) - w) / h - 0.5));
            const long i1 = static_cast<long>(std::ceil((std::max(a[0], b[0]) + w) / h - 0.5));
            const long j0 = static_cast<long>(std::floor((std::min(a[1], b[1]) - w) / h - 0.5));
            const long j1 = static_cast<long>(std::ceil((std::max(a[1], b[1]) + w) / h - 0.5));
            for (long j = j0; j <= j1; ++j) {
                const double py = (static_cast<double>(j) + 0.5) * h;
                for (long i = i0; i <= i1; ++i) {
                    const double px = (static_cast<double>(i) + 0.5) * h;
                    double t = len2 > 0.0 ? ((px - a[0]) * ex + (py - a[1]) * ey) / len2 : 0.0;
                    t = std::clamp(t, 0.0, 1.0);
                    const double dx = px - (a[0] + t * ex), dy = py - (a[1] + t * ey);
                    if (dx * dx + dy * dy <= w * w) {
                        const long iw = ((i % lnx) + lnx) % lnx, jw = ((j % lny) + lny) % lny;
                        dark[static_cast<std::size_t>(jw) * nx + static_cast<std::size_t>(iw)] = 1;
                    }
                }
            }
        }
    }
    return BinaryField(box, nx, ny, std::move(dark),
                       "rasterized tessellation pixels=" + std::to_string(nx) + " wall_halfwidth=" +
                           format_decimal(wall_halfwidth));
}

BinaryField random_pixel_field(const BoxDomain& box, std::size_t nx, double p, Seed seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("dark probability must lie in [0, 1]");
    const double h = box.length(0) / static_cast<double>(nx);
    const auto ny = static_cast<std::size_t>(std::llround(box.length(1) / h));
    Rng rng(seed);
    std::vector<std::uint8_t> dark(nx * ny);
    for (auto& d : dark) d = rng.uniform() < p ? 1 : 0;
    return BinaryField(box, nx, ny, std::move(dark),
                       "random pixels p=" + format_decimal(p) + " seed=" + std::to_string(seed.value));
}

}  // namespace hupa
