#include "aroptk/rates.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace aroptk::rates {

void SectorPanel::validate() const {
    const auto ns = static_cast<Eigen::Index>(sectors.size());
    const auto nt = static_cast<Eigen::Index>(n_years);
    if (ns == 0 || nt == 0) throw DataError("panel: empty");
    for (const auto* m : {&surplus, &depreciation, &compensation, &value_added}) {
        if (m->rows() != ns || m->cols() != nt)
            throw DataError("panel: matrix dimensions disagree with sectors x years");
        if (!m->allFinite()) throw DataError("panel: non-finite entry");
    }
    if (total_capital_stock.size() != nt || total_intermediate_consumption.size() != nt)
        throw DataError("panel: economy-wide series length mismatch");
    if ((compensation.array() < 0.0).any() || (value_added.array() < 0.0).any())
        throw DataError("panel: negative compensation or value added");
    for (int t = 0; t < n_years; ++t) {
        if (!(total_capital_stock(t) > 0.0)) {
            std::ostringstream os;
            os << "panel: non-positive capital stock in year " << year_at(t);
            throw DataError(os.str());
        }
    }
}

std::string to_string(MaskProvenance p) {
    switch (p) {
        case MaskProvenance::criteria: return "criteria";
        case MaskProvenance::pca_simple: return "pca_simple";
        case MaskProvenance::pca_weighted: return "pca_weighted";
        case MaskProvenance::bw: return "bw";
        case MaskProvenance::dfm: return "dfm";
        case MaskProvenance::all: return "all";
    }
    return "?";
}

MaskProvenance provenance_from_string(const std::string& s) {
    if (s == "criteria") return MaskProvenance::criteria;
    if (s == "pca_simple") return MaskProvenance::pca_simple;
    if (s == "pca_weighted") return MaskProvenance::pca_weighted;
    if (s == "bw") return MaskProvenance::bw;
    if (s == "dfm") return MaskProvenance::dfm;
    if (s == "all") return MaskProvenance::all;
    throw DataError("unknown mask provenance: " + s);
}

std::string normalize_sector_name(const std::string& name) {
    std::string out;
    bool in_space = true;
    for (unsigned char c : name) {
        if (std::isspace(c)) {
            if (!in_space) out.push_back(' ');
            in_space = true;
        } else {
            out.push_back(static_cast<char>(std::tolower(c)));
            in_space = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

bool ClassificationMask::included(const std::string& sector) const {
    auto it = flags.find(normalize_sector_name(sector));
    if (it == flags.end()) throw DataError("mask: unknown sector '" + sector + "'");
    return it->second == 1;
}

void ClassificationMask::validate() const {
    if (flags.empty()) throw DataError("mask: empty");
    for (const auto& [name, flag] : flags) {
        if (flag != 0 && flag != 1)
            throw DataError("mask: flag outside {0,1} for sector '" + name + "'");
        if (provenance == MaskProvenance::all && flag != 1)
            throw DataError("mask: provenance 'all' requires every flag = 1");
    }
}

ClassificationMask all_ones_mask(const SectorPanel& panel) {
    ClassificationMask mask;
    mask.provenance = MaskProvenance::all;
    for (const auto& s : panel.sectors) mask.flags[normalize_sector_name(s)] = 1;
    return mask;
}

std::string to_string(const RateVariant& v) {
    std::string s = v.basis == RateBasis::gross ? "gross" : "net";
    s += v.weighting == RateWeighting::weighted ? "_weighted" : "_unweighted";
    return s;
}

namespace {

const Eigen::MatrixXd& share_matrix(const SectorPanel& panel, ShareBasis basis) {
    return basis == ShareBasis::value_added ? panel.value_added : panel.compensation;
}

}  // namespace

Eigen::MatrixXd disaggregate_capital(const SectorPanel& panel, ShareBasis basis) {
    panel.validate();
    const Eigen::MatrixXd& base = share_matrix(panel, basis);
    const auto ns = static_cast<Eigen::Index>(panel.sectors.size());
    Eigen::MatrixXd cc(ns, panel.n_years);
    for (int t = 0; t < panel.n_years; ++t) {
        double total = base.col(t).sum();
        if (!(total > 0.0)) {
            std::ostringstream os;
            os << "disaggregation: zero total share basis in year " << panel.year_at(t);
            throw DataError(os.str());
        }
        double pool = panel.total_capital_stock(t) + panel.total_intermediate_consumption(t);
        cc.col(t) = base.col(t) * (pool / total);
    }
    return cc;
}

Eigen::MatrixXd sector_rates(const SectorPanel& panel, RateBasis basis, ShareBasis share_basis) {
    Eigen::MatrixXd cc = disaggregate_capital(panel, share_basis);
    const auto ns = static_cast<Eigen::Index>(panel.sectors.size());
    Eigen::MatrixXd rates(ns, panel.n_years);
    for (int t = 0; t < panel.n_years; ++t) {
        for (Eigen::Index s = 0; s < ns; ++s) {
            double surplus = panel.surplus(s, t);
            if (basis == RateBasis::net) surplus -= panel.depreciation(s, t);
            double denom = cc(s, t) + panel.compensation(s, t);
            if (!(denom > 0.0)) {
                std::ostringstream os;
                os << "arop: non-positive capital denominator for sector '"
                   << panel.sectors[static_cast<std::size_t>(s)] << "' in year "
                   << panel.year_at(t);
                throw DataError(os.str());
            }
            rates(s, t) = surplus / denom;
        }
    }
    return rates;
}

TimeSeries compute_arop(const SectorPanel& panel, const ClassificationMask& mask,
                        const RateVariant& variant, ShareBasis share_basis) {
    mask.validate();
    std::vector<Eigen::Index> included;
    for (std::size_t s = 0; s < panel.sectors.size(); ++s) {
        if (mask.included(panel.sectors[s])) included.push_back(static_cast<Eigen::Index>(s));
    }
    if (included.empty()) throw DataError("arop: empty mask (no included sector)");

    Eigen::MatrixXd cc = disaggregate_capital(panel, share_basis);
    Eigen::MatrixXd rates = sector_rates(panel, variant.basis, share_basis);

    TimeSeries out;
    out.start_year = panel.start_year;
    out.label = "arop_" + to_string(variant);
    out.values.resize(static_cast<std::size_t>(panel.n_years));
    for (int t = 0; t < panel.n_years; ++t) {
        double acc = 0.0;
        if (variant.weighting == RateWeighting::weighted) {
            double total_capital = 0.0;
            for (Eigen::Index s : included) total_capital += cc(s, t) + panel.compensation(s, t);
            for (Eigen::Index s : included) {
                double w = (cc(s, t) + panel.compensation(s, t)) / total_capital;
                acc += w * rates(s, t);
            }
        } else {
            for (Eigen::Index s : included) acc += rates(s, t);
            acc /= static_cast<double>(included.size());
        }
        out.values[static_cast<std::size_t>(t)] = acc;
    }
    return out;
}

}  // namespace aroptk::rates
