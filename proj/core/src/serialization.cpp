#include "rfsfusion/serialization.hpp"

#include "rfsfusion/errors.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace rfs {

namespace {

void write_double(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

void write_gaussian(std::ostream& os, const WeightedGaussian& g) {
    os << "g ";
    write_double(os, g.weight());
    os << ' ' << g.dim();
    for (int i = 0; i < g.dim(); ++i) {
        os << ' ';
        write_double(os, g.mean()(i));
    }
    for (int r = 0; r < g.dim(); ++r) {
        for (int c = 0; c < g.dim(); ++c) {
            os << ' ';
            write_double(os, g.covariance()(r, c));
        }
    }
    os << '\n';
}

void write_mixture(std::ostream& os, const GaussianMixture& m) {
    for (const auto& g : m.components()) {
        write_gaussian(os, g);
    }
}

// Tokenized reader that skips comments and blank lines.
class LineReader {
public:
    explicit LineReader(std::istream& is) : is_(is) {}

    /// Next non-empty, non-comment line split into tokens; empty at EOF.
    std::vector<std::string> next() {
        std::string line;
        while (std::getline(is_, line)) {
            ++line_no_;
            std::istringstream ss(line);
            std::vector<std::string> tokens;
            std::string tok;
            while (ss >> tok) tokens.push_back(tok);
            if (tokens.empty() || tokens.front().front() == '#') continue;
            return tokens;
        }
        return {};
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw SchemaError("density text, line " + std::to_string(line_no_) + ": " + what);
    }

private:
    std::istream& is_;
    int line_no_ = 0;
};

double parse_double(LineReader& r, const std::string& tok) {
    try {
        return std::stod(tok);
    } catch (const std::exception&) {
        r.fail("expected a number, got '" + tok + "'");
    }
}

long parse_long(LineReader& r, const std::string& tok) {
    try {
        return std::stol(tok);
    } catch (const std::exception&) {
        r.fail("expected an integer, got '" + tok + "'");
    }
}

WeightedGaussian parse_gaussian(LineReader& r, const std::vector<std::string>& tokens) {
    if (tokens.size() < 3) r.fail("truncated gaussian record");
    const double weight = parse_double(r, tokens[1]);
    const int d = static_cast<int>(parse_long(r, tokens[2]));
    if (d <= 0 || tokens.size() != static_cast<std::size_t>(3 + d + d * d)) {
        r.fail("gaussian record has wrong field count");
    }
    Eigen::VectorXd mean(d);
    for (int i = 0; i < d; ++i) mean(i) = parse_double(r, tokens[3 + i]);
    Eigen::MatrixXd cov(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            cov(i, j) = parse_double(r, tokens[3 + d + i * d + j]);
        }
    }
    return WeightedGaussian(weight, std::move(mean), std::move(cov));
}

Label parse_label(LineReader& r, const std::string& tok) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) r.fail("expected label t:i, got '" + tok + "'");
    return Label{static_cast<int>(parse_long(r, tok.substr(0, colon))),
                 static_cast<int>(parse_long(r, tok.substr(colon + 1)))};
}

std::vector<std::string> expect_header(LineReader& r, const std::string& kind) {
    auto tokens = r.next();
    if (tokens.size() != 3 || tokens[0] != "rfs-density" || tokens[1] != kind ||
        tokens[2] != "1") {
        r.fail("expected header 'rfs-density " + kind + " 1'");
    }
    return tokens;
}

GaussianMixturePtr parse_mixture(LineReader& r, int ncomp) {
    std::vector<WeightedGaussian> comps;
    comps.reserve(static_cast<std::size_t>(ncomp));
    for (int i = 0; i < ncomp; ++i) {
        auto tokens = r.next();
        if (tokens.empty() || tokens[0] != "g") r.fail("expected gaussian record");
        comps.push_back(parse_gaussian(r, tokens));
    }
    return make_mixture(std::move(comps));
}

} // namespace

void write_text(std::ostream& os, const GlmbDensity& d) {
    os << "rfs-density glmb 1\n";
    for (const auto& c : d.components()) {
        os << "component " << c.history << ' ';
        write_double(os, c.weight);
        os << ' ' << c.labels.size();
        for (const Label& l : c.labels) os << ' ' << to_string(l);
        os << '\n';
        for (const Label& l : c.labels) {
            const auto& m = *c.tracks.at(l);
            os << "track " << to_string(l) << ' ' << m.size() << '\n';
            write_mixture(os, m);
        }
    }
}

void write_text(std::ostream& os, const GmbDensity& d) {
    os << "rfs-density gmb 1\n";
    os << "indexset " << d.index_set().size();
    for (int i : d.index_set()) os << ' ' << i;
    os << '\n';
    for (const auto& h : d.hypotheses()) {
        os << "hypothesis " << h.phi << ' ';
        write_double(os, h.weight);
        os << ' ' << h.indices.size();
        for (int i : h.indices) os << ' ' << i;
        os << '\n';
        for (int i : h.indices) {
            const auto& m = *h.densities.at(i);
            os << "density " << i << ' ' << m.size() << '\n';
            write_mixture(os, m);
        }
    }
}

void write_text(std::ostream& os, const SoGmbDensity& d) {
    os << "rfs-density sogmb 1\n";
    os << "indexset " << d.index_set().size();
    for (int i : d.index_set()) os << ' ' << i;
    os << '\n';
    for (const auto& h : d.hypotheses()) {
        os << "hypothesis ";
        write_double(os, h.weight);
        os << ' ' << h.indices.size();
        for (int i : h.indices) os << ' ' << i;
        os << '\n';
        for (int i : h.indices) {
            const auto& m = *h.densities.at(i);
            os << "density " << i << ' ' << m.size() << '\n';
            write_mixture(os, m);
        }
    }
}

std::string to_text(const GlmbDensity& d) {
    std::ostringstream os;
    write_text(os, d);
    return os.str();
}

std::string to_text(const GmbDensity& d) {
    std::ostringstream os;
    write_text(os, d);
    return os.str();
}

std::string to_text(const SoGmbDensity& d) {
    std::ostringstream os;
    write_text(os, d);
    return os.str();
}

GlmbDensity read_glmb_text(std::istream& is) {
    LineReader r(is);
    expect_header(r, "glmb");
    std::vector<GlmbComponent> components;
    for (auto tokens = r.next(); !tokens.empty(); tokens = r.next()) {
        if (tokens[0] != "component" || tokens.size() < 4) r.fail("expected component record");
        GlmbComponent c;
        c.history = static_cast<int>(parse_long(r, tokens[1]));
        c.weight = parse_double(r, tokens[2]);
        const auto n = static_cast<std::size_t>(parse_long(r, tokens[3]));
        if (tokens.size() != 4 + n) r.fail("component label count mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            c.labels.push_back(parse_label(r, tokens[4 + i]));
        }
        for (std::size_t i = 0; i < n; ++i) {
            auto track = r.next();
            if (track.size() != 3 || track[0] != "track") r.fail("expected track record");
            const Label l = parse_label(r, track[1]);
            const int ncomp = static_cast<int>(parse_long(r, track[2]));
            c.tracks[l] = parse_mixture(r, ncomp);
        }
        components.push_back(std::move(c));
    }
    return GlmbDensity(std::move(components));
}

GmbDensity read_gmb_text(std::istream& is) {
    LineReader r(is);
    expect_header(r, "gmb");
    auto tokens = r.next();
    if (tokens.size() < 2 || tokens[0] != "indexset") r.fail("expected indexset record");
    const auto n_idx = static_cast<std::size_t>(parse_long(r, tokens[1]));
    if (tokens.size() != 2 + n_idx) r.fail("indexset count mismatch");
    std::vector<int> index_set;
    for (std::size_t i = 0; i < n_idx; ++i) {
        index_set.push_back(static_cast<int>(parse_long(r, tokens[2 + i])));
    }
    std::vector<GmbHypothesis> hypotheses;
    for (tokens = r.next(); !tokens.empty(); tokens = r.next()) {
        if (tokens[0] != "hypothesis" || tokens.size() < 4) r.fail("expected hypothesis record");
        GmbHypothesis h;
        h.phi = static_cast<int>(parse_long(r, tokens[1]));
        h.weight = parse_double(r, tokens[2]);
        const auto n = static_cast<std::size_t>(parse_long(r, tokens[3]));
        if (tokens.size() != 4 + n) r.fail("hypothesis index count mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            h.indices.push_back(static_cast<int>(parse_long(r, tokens[4 + i])));
        }
        for (std::size_t i = 0; i < n; ++i) {
            auto density = r.next();
            if (density.size() != 3 || density[0] != "density") r.fail("expected density record");
            const int idx = static_cast<int>(parse_long(r, density[1]));
            const int ncomp = static_cast<int>(parse_long(r, density[2]));
            h.densities[idx] = parse_mixture(r, ncomp);
        }
        hypotheses.push_back(std::move(h));
    }
    return GmbDensity(std::move(index_set), std::move(hypotheses));
}

SoGmbDensity read_sogmb_text(std::istream& is) {
    LineReader r(is);
    expect_header(r, "sogmb");
    auto tokens = r.next();
    if (tokens.size() < 2 || tokens[0] != "indexset") r.fail("expected indexset record");
    const auto n_idx = static_cast<std::size_t>(parse_long(r, tokens[1]));
    if (tokens.size() != 2 + n_idx) r.fail("indexset count mismatch");
    std::vector<int> index_set;
    for (std::size_t i = 0; i < n_idx; ++i) {
        index_set.push_back(static_cast<int>(parse_long(r, tokens[2 + i])));
    }
    std::vector<SoGmbHypothesis> hypotheses;
    for (tokens = r.next(); !tokens.empty(); tokens = r.next()) {
        if (tokens[0] != "hypothesis" || tokens.size() < 3) r.fail("expected hypothesis record");
        SoGmbHypothesis h;
        h.weight = parse_double(r, tokens[1]);
        const auto n = static_cast<std::size_t>(parse_long(r, tokens[2]));
        if (tokens.size() != 3 + n) r.fail("hypothesis index count mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            h.indices.push_back(static_cast<int>(parse_long(r, tokens[3 + i])));
        }
        for (std::size_t i = 0; i < n; ++i) {
            auto density = r.next();
            if (density.size() != 3 || density[0] != "density") r.fail("expected density record");
            const int idx = static_cast<int>(parse_long(r, density[1]));
            const int ncomp = static_cast<int>(parse_long(r, density[2]));
            h.densities[idx] = parse_mixture(r, ncomp);
        }
        hypotheses.push_back(std::move(h));
    }
    return SoGmbDensity(std::move(index_set), std::move(hypotheses));
}

GlmbDensity glmb_from_text(const std::string& text) {
    std::istringstream is(text);
    return read_glmb_text(is);
}

GmbDensity gmb_from_text(const std::string& text) {
    std::istringstream is(text);
    return read_gmb_text(is);
}

SoGmbDensity sogmb_from_text(const std::string& text) {
    std::istringstream is(text);
    return read_sogmb_text(is);
}

} // namespace rfs
