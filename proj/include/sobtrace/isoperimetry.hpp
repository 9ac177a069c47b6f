#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sobtrace/domains.hpp"

namespace sobtrace {

// Subset of the inside cells of a grid domain.
class GridSet {
public:
    GridSet() = default;
    explicit GridSet(std::shared_ptr<const GridDomain> parent);
    GridSet(std::shared_ptr<const GridDomain> parent, std::vector<std::uint8_t> member);

    const GridDomain& parent() const { return *parent_; }
    std::shared_ptr<const GridDomain> parent_ptr() const { return parent_; }
    const std::vector<std::uint8_t>& member() const { return member_; }
    bool contains(std::size_t cell) const { return member_[cell] != 0; }
    void set(std::size_t cell, bool on);
    std::size_t count() const { return count_; }
    double measure() const;

private:
    std::shared_ptr<const GridDomain> parent_;
    std::vector<std::uint8_t> member_;
    std::size_t count_ = 0;
};

// h^{N-1} times the number of faces between a cell of E and an inside cell not in E.
double grid_perimeter(const GridSet& E);

// Same count restricted to one part: faces between E cells of part i and part-i
// cells not in E. part_ids holds one entry per cell (-1 outside).
double grid_perimeter_in_part(const GridSet& E, const std::vector<int>& part_ids, int part);

std::vector<int> grid_part_ids(const GridDomain& gd);

struct RectangleProfile {
    double lower_bound = 0.0;  // sqrt(2 a s)
    double psi = 0.0;          // perimeter of the witness
    bool quarter_disc = true;  // witness shape: quarter disc at a corner, else strip
    double witness_extent = 0.0;  // disc radius or strip width
};

// Q = (0,1) x (0,a), 0 < a < 1, 0 <= s <= a/2.
RectangleProfile rectangle_profile(double a, double s);

// s / sqrt(2) on [0, lambda/2) of the truncated skyscrapers.
double skyscraper_profile_bound(double s, int k_max = kDefaultKMax);
double skyscrapers_measure(int k_max);

struct RoomsWitness {
    int k = 0;                       // first room contained in the witness
    double room_measure = 0.0;       // 2^{-2k} pi
    double cut_width = 0.0;          // width of the passage that is cut
    long double perimeter = 0.0L;    // 2^{-4(k-1)}
    long double bound = 0.0L;        // pi^{-2} 2^8 s^2
    bool within_bound = false;
    std::string description;
};

// Witness set for 0 < s < 2^{-4} pi: rooms k, k+1, ... with their passages, cut
// across the passage entering room k, where 2^{-2(k+1)} pi < s <= 2^{-2k} pi.
RoomsWitness rooms_passages_witness(double s);

struct ProfileBudget {
    int max_passes = 200;
    int distance_seeds = 8;
};

struct ProfilePoint {
    double s = 0.0;
    double witness_perimeter = 0.0;      // best perimeter found, an upper bound on I(s)
    double grid_perimeter = 0.0;         // best purely grid-based witness
    double witness_measure = 0.0;
    std::string witness_source;
    std::optional<double> analytic_bound;  // registered lower bound
    bool bound_violated = false;           // witness below analytic bound minus 4h
    std::shared_ptr<GridSet> witness;
};

// Heuristic upper bound on I_Omega(s): seeded candidates improved by single-cell
// flips that keep the measure in [s, lambda/2]. Registered analytic witnesses
// enter as extra candidates.
ProfilePoint profile_search(std::shared_ptr<const GridDomain> gd, double s, const ProfileBudget& budget = {});

// I_Omega(s) extended to [lambda/2, lambda] by reflection.
ProfilePoint profile_search_reflected(std::shared_ptr<const GridDomain> gd, double s,
                                      const ProfileBudget& budget = {});

std::optional<double> analytic_profile_lower_bound(const Domain& dom, double s);

// (P(E, Omega), sum_i P(E cap Omega_i, Omega_i)).
std::pair<double, double> superadditivity_check(const GridSet& E, const std::vector<int>& part_ids);

// Face sets, as sorted (cell, axis) pairs of the lower cell, used by both sides above.
std::vector<std::pair<std::size_t, int>> perimeter_faces(const GridSet& E, const std::vector<int>* part_ids = nullptr,
                                                         int part = -1);

}  // namespace sobtrace
