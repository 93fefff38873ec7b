#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "aroptk/core.hpp"

namespace aroptk::rates {

/// Per-sector national-accounts panel plus the economy-wide capital totals.
/// Matrices are sectors (rows) x years (columns).
struct SectorPanel {
    std::vector<std::string> sectors;
    int start_year = 0;
    int n_years = 0;
    Eigen::MatrixXd surplus;        // gross operating surplus, per year
    Eigen::MatrixXd depreciation;   // consumption of fixed capital, per year
    Eigen::MatrixXd compensation;   // variable capital V, per year
    Eigen::MatrixXd value_added;    // per year
    Eigen::VectorXd total_capital_stock;             // economy-wide stock, per year
    Eigen::VectorXd total_intermediate_consumption;  // economy-wide flow, per year

    void validate() const;
    int year_at(int t) const { return start_year + t; }
};

enum class MaskProvenance { criteria, pca_simple, pca_weighted, bw, dfm, all };

std::string to_string(MaskProvenance p);
MaskProvenance provenance_from_string(const std::string& s);

/// Per-sector include (1) / exclude (0) flags.
struct ClassificationMask {
    std::map<std::string, int> flags;
    MaskProvenance provenance = MaskProvenance::criteria;

    bool included(const std::string& sector) const;
    /// `all`-provenance masks must have every flag set to 1.
    void validate() const;
};

/// Sector names are matched after whitespace normalization and case folding.
std::string normalize_sector_name(const std::string& name);

ClassificationMask all_ones_mask(const SectorPanel& panel);

enum class RateBasis { gross, net };
enum class RateWeighting { weighted, unweighted };

struct RateVariant {
    RateBasis basis = RateBasis::net;
    RateWeighting weighting = RateWeighting::weighted;
};

std::string to_string(const RateVariant& v);

enum class ShareBasis { value_added, compensation };

/// Allocate the economy-wide capital stock plus intermediate consumption to
/// sectors in proportion to their per-year share of the chosen basis.
/// Returns constant_capital[sector, year].
Eigen::MatrixXd disaggregate_capital(const SectorPanel& panel,
                                     ShareBasis basis = ShareBasis::value_added);

/// Weighted (or plain) average of sectoral profit rates over the included
/// sectors. Sector rate = S / (C + V) with S gross or net of depreciation;
/// weights are each sector's share of included C + V.
TimeSeries compute_arop(const SectorPanel& panel, const ClassificationMask& mask,
                        const RateVariant& variant,
                        ShareBasis share_basis = ShareBasis::value_added);

/// Per-sector rate series r[s,t] for the given basis (used by the
/// variable-selection stages, which treat sector rates as predictors).
Eigen::MatrixXd sector_rates(const SectorPanel& panel, RateBasis basis,
                             ShareBasis share_basis = ShareBasis::value_added);

}  // namespace aroptk::rates
