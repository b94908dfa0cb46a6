"""Built-in topic bank and the external topic-provider contract.

The bank supplies deterministic chart subjects (a categorical attribute,
a temporal attribute, and a quantitative attribute with unit and range)
across energy, finance, health, transport, and climate.  An external
provider can replace the bank: one request/response exchange over a
local command or an HTTP endpoint, with a 10 s timeout and fallback to
the bank on any failure.
"""

from __future__ import annotations

import json
import logging
import subprocess
import urllib.request
from dataclasses import dataclass

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TopicTemplate:
    topic: str
    title_percent: str
    title_absolute: str
    cat_name: str
    cat_values: tuple[str, ...]
    time_name: str
    time_values: tuple[str, ...]
    quant_percent: str          # quantitative attribute name in percent mode
    quant_absolute: str         # quantitative attribute name in absolute mode
    unit_absolute: str
    value_range: tuple[float, float]


def _years(start: int, end: int) -> tuple[str, ...]:
    return tuple(str(y) for y in range(start, end + 1))


_QUARTERS = tuple(f"Q{q} {y}" for y in (2022, 2023, 2024) for q in (1, 2, 3, 4))
_MONTHS = ("Jan", "Feb", "Mar", "Apr", "May", "Jun",
           "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")

TOPIC_BANK: tuple[TopicTemplate, ...] = (
    # --- energy ---
    TopicTemplate(
        "energy-mix", "Electricity Mix by Source", "Electricity Generation by Source",
        "Energy Source", ("Coal", "Gas", "Solar", "Wind", "Hydro", "Nuclear", "Biomass"),
        "Year", _years(2008, 2024), "proportion", "generation", "TWh", (40.0, 420.0)),
    TopicTemplate(
        "energy-consumption", "Final Energy Use by Sector", "Energy Consumption by Sector",
        "Sector", ("Industry", "Transport", "Residential", "Services", "Agriculture"),
        "Year", _years(2005, 2024), "share", "consumption", "TWh", (60.0, 380.0)),
    TopicTemplate(
        "energy-capacity", "Installed Capacity Mix", "Installed Capacity by Technology",
        "Technology", ("Solar PV", "Onshore Wind", "Offshore Wind", "Hydro", "Gas Turbine"),
        "Year", _years(2010, 2024), "share", "capacity", "GW", (5.0, 95.0)),
    TopicTemplate(
        "fuel-imports", "Fuel Import Mix by Origin", "Fuel Imports by Origin",
        "Origin", ("Domestic", "Norway", "Qatar", "USA", "Algeria", "Australia"),
        "Year", _years(2012, 2024), "share", "import volume", "million tons", (2.0, 48.0)),
    # --- finance ---
    TopicTemplate(
        "revenue-segments", "Revenue Mix by Segment", "Revenue by Business Segment",
        "Segment", ("Cloud", "Hardware", "Services", "Advertising", "Licensing"),
        "Quarter", _QUARTERS, "share", "revenue", "billion USD", (1.0, 42.0)),
    TopicTemplate(
        "household-spending", "Household Budget Shares", "Household Spending by Category",
        "Category", ("Housing", "Food", "Transport", "Leisure", "Healthcare", "Savings"),
        "Year", _years(2009, 2024), "share", "spending", "thousand USD", (2.0, 28.0)),
    TopicTemplate(
        "portfolio-allocation", "Portfolio Allocation by Asset Class",
        "Portfolio Value by Asset Class",
        "Asset Class", ("Equities", "Bonds", "Real Estate", "Commodities", "Cash"),
        "Year", _years(2011, 2024), "allocation", "value", "billion USD", (4.0, 60.0)),
    TopicTemplate(
        "bank-lending", "Loan Book Composition", "Bank Lending by Borrower Type",
        "Borrower", ("Mortgages", "Corporate", "Consumer", "Public Sector"),
        "Year", _years(2007, 2024), "share", "lending", "billion USD", (8.0, 120.0)),
    TopicTemplate(
        "tax-revenue", "Tax Revenue Composition", "Tax Revenue by Source",
        "Tax Source", ("Income Tax", "VAT", "Corporate Tax", "Excise", "Property Tax"),
        "Year", _years(2006, 2024), "share", "revenue", "billion USD", (10.0, 140.0)),
    # --- health ---
    TopicTemplate(
        "hospital-admissions", "Admissions Mix by Ward", "Hospital Admissions by Ward",
        "Ward", ("Cardiology", "Oncology", "Orthopedics", "Neurology", "Pediatrics"),
        "Year", _years(2010, 2024), "share", "admissions", "thousand cases", (3.0, 52.0)),
    TopicTemplate(
        "vaccination-coverage", "Vaccination Coverage Mix", "Vaccinations by Age Group",
        "Age Group", ("Under 18", "18 to 39", "40 to 64", "65 and over"),
        "Month", _MONTHS, "share", "doses", "thousand doses", (6.0, 85.0)),
    TopicTemplate(
        "health-spending", "Health Budget Shares", "Health Spending by Program",
        "Program", ("Primary Care", "Hospitals", "Pharmaceuticals", "Prevention", "Administration"),
        "Year", _years(2008, 2024), "share", "spending", "billion USD", (2.0, 45.0)),
    TopicTemplate(
        "disease-burden", "Case Mix by Condition", "Reported Cases by Condition",
        "Condition", ("Influenza", "Measles", "Pertussis", "Hepatitis", "Tuberculosis"),
        "Year", _years(2009, 2024), "share", "cases", "thousand cases", (1.0, 38.0)),
    # --- transport ---
    TopicTemplate(
        "modal-split", "Commuting Modal Split", "Commuter Trips by Mode",
        "Mode", ("Car", "Bus", "Rail", "Bicycle", "Walking"),
        "Year", _years(2010, 2024), "share", "trips", "million trips", (4.0, 70.0)),
    TopicTemplate(
        "freight-volume", "Freight Mix by Mode", "Freight Volume by Mode",
        "Mode", ("Road", "Rail", "Inland Waterway", "Air", "Pipeline"),
        "Year", _years(2007, 2024), "share", "volume", "million tons", (5.0, 130.0)),
    TopicTemplate(
        "vehicle-sales", "New Registrations by Powertrain", "Vehicle Sales by Powertrain",
        "Powertrain", ("Petrol", "Diesel", "Hybrid", "Battery Electric", "Plug-in Hybrid"),
        "Year", _years(2014, 2024), "share", "sales", "thousand vehicles", (8.0, 160.0)),
    TopicTemplate(
        "airport-traffic", "Passenger Mix by Region", "Airport Passengers by Region",
        "Region", ("Domestic", "Europe", "North America", "Asia Pacific", "Middle East"),
        "Quarter", _QUARTERS, "share", "passengers", "million passengers", (1.0, 24.0)),
    # --- climate ---
    TopicTemplate(
        "emissions-sectors", "Emissions Shares by Sector", "Greenhouse Gas Emissions by Sector",
        "Sector", ("Power", "Industry", "Transport", "Buildings", "Agriculture", "Waste"),
        "Year", _years(2005, 2024), "share", "emissions", "million tons", (6.0, 110.0)),
    TopicTemplate(
        "water-use", "Water Withdrawal Shares", "Water Withdrawals by Use",
        "Use", ("Agriculture", "Industry", "Municipal", "Energy Cooling"),
        "Year", _years(2008, 2024), "share", "withdrawal", "billion liters", (12.0, 150.0)),
    TopicTemplate(
        "land-cover", "Land Cover Composition", "Land Area by Cover Type",
        "Cover Type", ("Forest", "Cropland", "Grassland", "Urban", "Wetland"),
        "Year", _years(2000, 2024), "share", "area", "thousand hectares", (14.0, 170.0)),
    TopicTemplate(
        "waste-streams", "Waste Treatment Shares", "Municipal Waste by Treatment",
        "Treatment", ("Recycling", "Composting", "Incineration", "Landfill"),
        "Year", _years(2009, 2024), "share", "waste", "million tons", (2.0, 36.0)),
    TopicTemplate(
        "renewable-investment", "Clean Energy Investment Mix", "Clean Energy Investment by Field",
        "Field", ("Solar", "Wind", "Grids", "Storage", "Hydrogen", "Efficiency"),
        "Year", _years(2013, 2024), "share", "investment", "billion USD", (3.0, 55.0)),
)


class ProviderError(Exception):
    """External topic provider failed or returned an unusable record."""


@dataclass(frozen=True)
class TopicProviderConfig:
    """How to reach an external topic provider.

    Exactly one of `command` (run as a shell command, JSON request on
    stdin, JSON response on stdout) or `url` (HTTP POST of the JSON
    request) should be set.
    """

    command: str | None = None
    url: str | None = None
    timeout: float = 10.0


def provider_request_payload(topic_seed: int) -> dict:
    return {
        "topic_seed": topic_seed,
        "wanted": ["categorical", "temporal", "quantitative"],
    }


def fetch_from_provider(config: TopicProviderConfig, topic_seed: int) -> dict:
    """Run the single request/response exchange; returns the raw record."""
    payload = json.dumps(provider_request_payload(topic_seed))
    if config.command:
        try:
            proc = subprocess.run(
                config.command, shell=True, input=payload.encode(),
                capture_output=True, timeout=config.timeout)
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise ProviderError(f"provider command failed: {exc}") from exc
        if proc.returncode != 0:
            raise ProviderError(
                f"provider command exited {proc.returncode}: "
                f"{proc.stderr.decode(errors='replace').strip()}")
        raw = proc.stdout
    elif config.url:
        req = urllib.request.Request(
            config.url, data=payload.encode(),
            headers={"Content-Type": "application/json"})
        try:
            with urllib.request.urlopen(req, timeout=config.timeout) as resp:
                raw = resp.read()
        except OSError as exc:
            raise ProviderError(f"provider endpoint failed: {exc}") from exc
    else:
        raise ProviderError("provider configured with neither command nor url")
    try:
        record = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ProviderError(f"provider returned invalid JSON: {exc}") from exc
    if not isinstance(record, dict):
        raise ProviderError("provider record must be a JSON object")
    return record
