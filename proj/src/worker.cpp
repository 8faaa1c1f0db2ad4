#include "depas/worker.hpp"

namespace depas {

AdmitAction admit_action(std::size_t queue_length, double capacity, int hops, bool accepting,
                         const AdmissionConfig& config) {
    if (accepting && static_cast<double>(queue_length) / capacity < config.max_queue_per_capacity) {
        return AdmitAction::Enqueue;
    }
    if (hops < config.max_hops) {
        return AdmitAction::Forward;
    }
    return AdmitAction::Reject;
}

}  // namespace depas
