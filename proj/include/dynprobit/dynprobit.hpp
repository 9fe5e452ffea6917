#pragma once

#include "dynprobit/errors.hpp"
#include "dynprobit/mf_vb.hpp"
#include "dynprobit/model.hpp"
#include "dynprobit/oracle.hpp"
#include "dynprobit/pfm_vb.hpp"
#include "dynprobit/rng.hpp"
#include "dynprobit/sun_smoother.hpp"
#include "dynprobit/truncnorm.hpp"
