#ifndef IRS_HARQ_IRS_HARQ_HPP
#define IRS_HARQ_IRS_HARQ_HPP

#include <irs_harq/analysis.hpp>
#include <irs_harq/channel_model.hpp>
#include <irs_harq/errors.hpp>
#include <irs_harq/mc_simulator.hpp>
#include <irs_harq/random.hpp>
#include <irs_harq/specfun.hpp>
#include <irs_harq/sweep.hpp>

#endif // IRS_HARQ_IRS_HARQ_HPP
