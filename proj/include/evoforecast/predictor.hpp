#pragma once

#include <vector>

namespace evoforecast {

// A one-step forecaster with recurrent state: step() consumes feature rows
// in time order and returns the prediction for each. snapshot()/restore()
// let callers branch the state, which recursive multi-step forecasting
// needs to roll hypothetical futures without disturbing the actual path.
class StepPredictor {
  public:
    virtual ~StepPredictor() = default;

    virtual void reset() = 0;
    virtual double step(const std::vector<double>& row) = 0;
    virtual std::vector<double> snapshot() const = 0;
    virtual void restore(const std::vector<double>& state) = 0;
};

}  // namespace evoforecast
