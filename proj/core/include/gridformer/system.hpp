#pragma once

#include "gridformer/devices.hpp"
#include "gridformer/network.hpp"

namespace gridformer {

/// A device connected at a bus with its dispatch references.
struct DeviceAtBus {
    DeviceSpec spec;
    double p_ref = 0.5;
    double qv_ref = 1.0; ///< Q reference (PQ devices) or voltage setpoint
};

/// Fully assembled case: network plus linearized device models, one per
/// device bus, in bus order.
struct SystemModel {
    NetworkModel net;
    std::vector<DeviceAtBus> devices;
    std::vector<OperatingPoint> ops;
    std::vector<StateSpaceModel> models;
};

/// Thevenin line seen from a device bus through the static network with
/// the other buses open, expressed on the device's own base:
/// L_g = S_k [B_N^{-1}]_kk, tau = mean branch ratio. Throws
/// SingularBMatrix for ungrounded networks.
LineParams thevenin_line(const NetworkModel& net, int device_bus);

/// Solves each device's operating point against its Thevenin equivalent
/// and builds the admittance models.
SystemModel build_system(const NetworkModel& net, std::vector<DeviceAtBus> devices);

} // namespace gridformer
