"""Download the five-country 1995-2014 panel from the World Bank API.

Prints CSV in the layout the library expects:

    python tools/fetch_wdi.py > crates/core/data/balkan_1995_2014.csv
"""

import argparse
import csv
import sys

import requests

API = "https://api.worldbank.org/v2/country/{countries}/indicator/{indicator}"
COUNTRIES = {
    "BIH": "Bosnia and Herzegovina",
    "HRV": "Croatia",
    "MKD": "Macedonia",
    "SRB": "Serbia",
    "SVN": "Slovenia",
}
INDICATORS = {
    "co2_mt_per_capita": "EN.ATM.CO2E.PC",
    "gdp_const2015_usd": "NY.GDP.PCAP.KD",
    "energy_use_kgoe_per_capita": "EG.USE.PCAP.KG.OE",
    "population": "SP.POP.TOTL",
    "gdp_current_usd": "NY.GDP.PCAP.CD",
}
HEADER = [
    "country",
    "year",
    "co2_mt_per_capita",
    "gdp_const2010_usd",
    "energy_use_kgoe_per_capita",
    "population",
]


def fetch(indicator, first, last, session):
    """Map (iso3, year) -> value for one indicator."""
    url = API.format(countries=";".join(COUNTRIES), indicator=indicator)
    params = {"format": "json", "date": f"{first}:{last}", "per_page": 20000}
    resp = session.get(url, params=params, timeout=60)
    resp.raise_for_status()
    payload = resp.json()
    if len(payload) < 2 or payload[1] is None:
        raise RuntimeError(f"{indicator}: no data returned ({payload[0]})")
    out = {}
    for row in payload[1]:
        if row["value"] is not None:
            out[(row["countryiso3code"], int(row["date"]))] = float(row["value"])
    return out


def build_rows(series, first, last):
    gdp = series["gdp_const2015_usd"]
    rows = []
    for iso, name in sorted(COUNTRIES.items(), key=lambda kv: kv[1]):
        # constant-2015 -> constant-2010 dollars: a constant-2010 series equals current dollars in 2010
        base = (iso, 2010)
        if base not in gdp or base not in series["gdp_current_usd"]:
            raise RuntimeError(f"{name}: no 2010 GDP to rebase on")
        rebase = series["gdp_current_usd"][base] / gdp[base]
        for year in range(first, last + 1):
            key = (iso, year)
            missing = [k for k, s in series.items() if k != "gdp_current_usd" and key not in s]
            if missing:
                raise RuntimeError(f"{name} {year}: missing {', '.join(missing)}")
            gdp2010 = gdp[key] * rebase
            rows.append(
                [
                    name,
                    year,
                    f"{series['co2_mt_per_capita'][key]:.6g}",
                    f"{gdp2010:.2f}",
                    f"{series['energy_use_kgoe_per_capita'][key]:.2f}",
                    f"{int(round(series['population'][key]))}",
                ]
            )
    return rows


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--first", type=int, default=1995)
    parser.add_argument("--last", type=int, default=2014)
    args = parser.parse_args(argv)

    with requests.Session() as session:
        series = {col: fetch(code, min(args.first, 2010), max(args.last, 2010), session) for col, code in INDICATORS.items()}
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(HEADER)
    writer.writerows(build_rows(series, args.first, args.last))


if __name__ == "__main__":
    main()
