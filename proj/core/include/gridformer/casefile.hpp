#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gridformer/system.hpp"

namespace gridformer {

/// Self-describing JSON case document. Bus ids are user-facing; device
/// buses map to internal indices 0..n-1 in ascending id order, interior
/// buses follow, the single ground bus is last.
class CaseFile {
public:
    struct Bus {
        int id = 0;
        std::string kind; ///< device | interior | ground
    };
    struct CaseBranch {
        int from_id = 0;
        int to_id = 0;
        double b = 1.0;
        std::optional<double> tau; ///< defaults to the system tau
    };
    struct Device {
        int bus_id = 0;
        DeviceSpec spec;
        double p0 = 0.5;
        double qv0 = 1.0;
    };

    int version = 1;
    double omega0_hz = 50.0;
    double tau_default = 0.1;
    std::vector<Bus> buses;
    std::vector<CaseBranch> branches;
    std::vector<Device> devices;
    double f_min_hz = 0.05;
    double f_max_hz = 2000.0;
    int sweep_points = 500;
    double band_lo_hz = 5.0;
    double band_hi_hz = 200.0;

    static CaseFile load(const std::string& path);
    static CaseFile parse(const std::string& json_text);
    std::string to_json_string() const;

    /// Internal index for a bus id (device buses first); throws
    /// InvalidCaseFile for unknown ids.
    int internal_index(int bus_id) const;
    int bus_id_of(int internal_index) const;

    NetworkModel network() const;
    FrequencyGrid sweep_grid() const;
    /// Network plus solved operating points and built device models.
    /// Device buses without a device entry carry the NONE device.
    SystemModel system() const;

private:
    void validate() const;
    std::vector<int> ordered_ids() const; ///< device ids, interior ids, ground id
};

} // namespace gridformer
