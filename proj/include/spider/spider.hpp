#pragma once

#include "spider/constants.hpp"
#include "spider/covering.hpp"
#include "spider/domain.hpp"
#include "spider/filtration.hpp"
#include "spider/maximal.hpp"
#include "spider/mobius.hpp"
#include "spider/probability.hpp"
#include "spider/rearrangement.hpp"
#include "spider/scalar.hpp"
#include "spider/step_function.hpp"
#include "spider/verifier.hpp"
