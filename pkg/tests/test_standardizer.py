import unittest
import os
import sys
import random
import string
import datetime

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))  # Add project root to Python path
from sources.enricher import load_gazetteer
from sources.errors import InvalidIdError, UnparseableAddressError, UnparseableNameError
from sources.lexicons import Lexicons, load_default_lexicons
from sources.parser_profiler import tokenize
from sources.record_model import load_dataset
from sources.render import render_record
from sources.schemas import (CanonicalDate, DefectCode, FieldKind, FieldSchema, FieldState, RawRecord,
                             default_author_schema)
from sources.standardizer import (NameEvidence, StandardizerSettings, cleanse_dataset, cleanse_record,
                                  date_defect, expand_two_digit_year, standardize_address, standardize_date,
                                  standardize_id, standardize_name)

PROJECT_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))

class TestStandardizer(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.gazetteer = load_gazetteer(os.path.join(PROJECT_ROOT, "data", "gazetteer.csv"))
        cls.lexicons = load_default_lexicons().with_gazetteer(cls.gazetteer)
        cls.schema = default_author_schema()
        cls.records = load_dataset(os.path.join(PROJECT_ROOT, "data", "authors.csv"), cls.schema)

    def name(self, raw, lexicons=None, evidence=None):
        lexicons = lexicons or self.lexicons
        return standardize_name(tokenize(raw, FieldKind.PERSON_NAME, lexicons), lexicons, evidence)

    def address(self, raw):
        return standardize_address(tokenize(raw, FieldKind.ADDRESS, self.lexicons), self.gazetteer, self.lexicons)

    def cleanse(self, row_number):
        return cleanse_record(self.records[row_number - 1], self.lexicons, self.gazetteer, self.schema)

    def test_names(self):
        name = self.name("Dr. John Smit")
        self.assertEqual((name.first, name.last, name.title), ("John", "Smit", "Dr."))
        name = self.name("John William Smit")
        self.assertEqual((name.first, name.middle, name.last), ("John", "William", "Smit"))
        name = self.name("Smit John")
        self.assertEqual((name.first, name.last), ("John", "Smit"))
        name = self.name("J. Smit")
        self.assertEqual((name.first, name.last), ("J", "Smit"))
        self.assertTrue(name.first_is_initial)

    def test_name_order_corrections(self):
        name = self.name("Smit, John")
        self.assertEqual((name.first, name.last), ("John", "Smit"))
        name = self.name("Smit J.")
        self.assertEqual((name.first, name.last), ("J", "Smit"))
        name = self.name("Scott Lena")
        self.assertEqual((name.first, name.last), ("Lena", "Scott"))
        self.assertEqual(self.name("Smit").last, "Smit")

    def test_name_order_from_evidence(self):
        empty = Lexicons()
        evidence = NameEvidence()
        for _ in range(2):
            evidence.add(tokenize("Hiro Nakamura", FieldKind.PERSON_NAME, empty))
        name = self.name("Nakamura Hiro", lexicons=empty, evidence=evidence)
        self.assertEqual((name.first, name.last), ("Hiro", "Nakamura"))
        name = self.name("Nakamura Hiro", lexicons=empty)
        self.assertEqual((name.first, name.last), ("Nakamura", "Hiro"))

    def test_unparseable_name(self):
        with self.assertRaises(UnparseableNameError):
            self.name("123 -")

    def test_identifiers(self):
        self.assertEqual(str(standardize_id("0000012313453487")), "0000-0123-1345-3487")
        self.assertIsNone(standardize_id("0000-0000-0000-0000"))
        self.assertEqual(str(standardize_id("000102544118F006")), "0001-0254-4118-F006")
        self.assertEqual(str(standardize_id("0000-0123-1345-3487")), "0000-0123-1345-3487")
        self.assertEqual(str(standardize_id("0001 0254 4118 f006")), "0001-0254-4118-F006")

    def test_identifier_placeholders(self):
        settings = StandardizerSettings(id_placeholders=("1111-1111-1111-1111",))
        self.assertIsNone(standardize_id("1111111111111111", settings))
        self.assertIsNone(standardize_id("0000000000000000", settings))

    def test_invalid_identifiers(self):
        for raw in ("1234", "0000-0123-1345-348", "0000-0123-1345-348G", "not an id"):
            with self.assertRaises(InvalidIdError):
                standardize_id(raw)

    def test_dates(self):
        cases = {
            "12/23/1987": "1987-12-23",
            "23.12. 1987": "1987-12-23",
            "09/23/78": "1978-09-23",
            "14-1-1984": "1984-01-14",
            "23.09.1987": "1987-09-23",
            "1987-12-23": "1987-12-23",
        }
        for raw, expected in cases.items():
            self.assertEqual(str(standardize_date(raw)), expected, raw)
        self.assertIsNone(standardize_date("872312"))
        self.assertIsNone(standardize_date("1984"))

    def test_calendar_invalid_dates(self):
        self.assertIsNone(standardize_date("02/30/1987"))
        self.assertIsNone(standardize_date("13/23/1987"))
        self.assertEqual(date_defect("02/30/1987"), DefectCode.TYPO)

    def test_date_defects(self):
        self.assertEqual(date_defect("872312"), DefectCode.TYPO)
        self.assertEqual(date_defect("1984"), DefectCode.INCOMPLETE)
        self.assertEqual(date_defect("12/1987"), DefectCode.INCOMPLETE)

    def test_two_digit_year_pivot(self):
        self.assertEqual(expand_two_digit_year(78, 30), 1978)
        self.assertEqual(expand_two_digit_year(29, 30), 2029)
        self.assertEqual(expand_two_digit_year(30, 30), 1930)
        self.assertEqual(expand_two_digit_year(0, 30), 2000)
        settings = StandardizerSettings(two_digit_year_pivot=80)
        self.assertEqual(str(standardize_date("09/23/78", settings)), "2078-09-23")

    def test_yymmdd_heuristics(self):
        settings = StandardizerSettings(enable_yymmdd_heuristics=True)
        self.assertEqual(standardize_date("872312", settings), CanonicalDate(year=1987, month=12, day=23))
        self.assertEqual(standardize_date("871223", settings), CanonicalDate(year=1987, month=12, day=23))
        self.assertIsNone(standardize_date("879999", settings))

    def test_addresses(self):
        address = self.address("123 6 th Street, Melbourne, 32904")
        self.assertEqual((address.street, address.city, address.state, address.zip_code),
                         ("123 6 th Street", "Melbourne", "FL", "32904"))
        address = self.address("71 Pilgrim Ave. 32904")
        self.assertEqual((address.street, address.city, address.state, address.zip_code),
                         ("71 Pilgrim Ave.", "Melbourne", "FL", "32904"))
        address = self.address("44 Shirley Ave. West Chicago 60185")
        self.assertEqual((address.street, address.city, address.state, address.zip_code),
                         ("44 Shirley Ave.", "West Chicago", "IL", "60185"))
        address = self.address("6 th Street, 32904 123")
        self.assertEqual((address.street, address.city, address.state, address.zip_code),
                         ("123 6 th Street", "Melbourne", "FL", "32904"))

    def test_displaced_ordinals(self):
        self.assertEqual(self.address("10 Street 32904 6 th").street, "10 6 th Street")
        address = self.address("Street, 32904 6 th US")
        self.assertEqual((address.street, address.city), ("6 th Street", "Melbourne"))
        self.assertEqual(address.street_key, ("6th", "street"))

    def test_address_without_zip(self):
        address = self.address("44 Shirley Ave. West Chicago IL")
        self.assertEqual((address.street, address.city, address.state, address.zip_code),
                         ("44 Shirley Ave.", "West Chicago", "IL", None))

    def test_lowercase_state_code(self):
        address = self.address("Melbourne fl 32904")
        self.assertEqual((address.street, address.city, address.state, address.zip_code),
                         (None, "Melbourne", "FL", "32904"))
        address = self.address("West Chicago il")
        self.assertEqual((address.city, address.state, address.zip_code), ("West Chicago", "IL", None))

    def test_unparseable_address(self):
        with self.assertRaises(UnparseableAddressError):
            self.address("nowhere")

    def test_cleanse_row_2(self):
        record = self.cleanse(2)
        self.assertEqual(record.author_id, "12345")
        self.assertEqual((record.name.first, record.name.last), ("John", "Smit"))
        self.assertIsNone(record.identifier)
        self.assertEqual(str(record.birth_date), "1987-12-23")
        self.assertEqual(record.address.street, "123 6 th Street")
        self.assertEqual(record.address.zip_code, "32904")
        status = record.field_status
        self.assertEqual(status["Author ID"].state, FieldState.VALID)
        self.assertEqual(status["Name"].state, FieldState.VALID)
        self.assertEqual(str(status["ORCID"]), "REJECTED[INCOMPLETE]")
        self.assertEqual(str(status["Birth Date"]), "CORRECTED[TRANSFORM_FAULT]")
        self.assertEqual(str(status["Address"]), "CORRECTED[TRANSFORM_FAULT]")

    def test_cleanse_row_5(self):
        record = self.cleanse(5)
        self.assertIsNone(record.address)
        self.assertEqual(record.field_status["Address"].state, FieldState.MISSING)
        self.assertEqual(str(record.field_status["Name"]), "CORRECTED[TYPO]")
        self.assertEqual(str(record.birth_date), "1987-09-23")

    def test_rejected_dates(self):
        self.assertEqual(str(self.cleanse(3).field_status["Birth Date"]), "REJECTED[TYPO]")
        self.assertEqual(str(self.cleanse(8).field_status["Birth Date"]), "REJECTED[INCOMPLETE]")
        self.assertEqual(self.cleanse(4).field_status["ORCID"].state, FieldState.MISSING)

    def test_rejected_field_reports_issue(self):
        record = RawRecord(source_id="t", row_number=1, values={"Name": "John Smit", "ORCID": "12-34"})
        cleansed = cleanse_record(record, self.lexicons, self.gazetteer, self.schema)
        self.assertEqual(str(cleansed.field_status["ORCID"]), "REJECTED[TYPO]")
        self.assertIsNone(cleansed.identifier)
        self.assertTrue(any(issue.startswith("ORCID") for issue in cleansed.issues))

    def test_second_field_of_a_kind_is_extra(self):
        schema = [FieldSchema(name="Name", kind=FieldKind.PERSON_NAME),
                  FieldSchema(name="Born", kind=FieldKind.DATE),
                  FieldSchema(name="Died", kind=FieldKind.DATE)]
        record = RawRecord(source_id="t", row_number=1,
                           values={"Name": "John Smit", "Born": "12/23/1987", "Died": "2020"})
        cleansed = cleanse_record(record, self.lexicons, self.gazetteer, schema)
        self.assertEqual(str(cleansed.birth_date), "1987-12-23")
        self.assertEqual(cleansed.extras, {"Died": "2020"})
        self.assertEqual(cleansed.field_for("birth_date"), "Born")

    def test_idempotence(self):
        first = cleanse_dataset(self.records, self.schema, self.lexicons, self.gazetteer)
        for record in first:
            again = cleanse_record(render_record(record, self.schema), self.lexicons, self.gazetteer, self.schema)
            self.assertEqual((again.author_id, again.name, again.identifier, again.birth_date, again.address),
                             (record.author_id, record.name, record.identifier, record.birth_date, record.address))
            for field, status in again.field_status.items():
                self.assertIn(status.state, (FieldState.VALID, FieldState.MISSING), f"{record.ref} {field}")

    def test_random_bytes(self):
        rng = random.Random(2024)
        for _ in range(10000):
            raw = bytes(rng.randrange(256) for _ in range(rng.randint(1, 20))).decode("latin-1")
            date = standardize_date(raw)
            if date is not None:
                datetime.date(date.year, date.month, date.day)
            try:
                identifier = standardize_id(raw)
            except InvalidIdError:
                continue
            if identifier is not None:
                self.assertRegex(identifier.value, r"^[0-9A-F]{4}(-[0-9A-F]{4}){3}$")

    def test_never_raises_on_random_input(self):
        rng = random.Random(1987)
        alphabet = string.ascii_letters + string.digits + " .,-/;#'" + "      "
        for _ in range(10000):
            values = {field.name: "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 24)))
                      for field in self.schema}
            record = RawRecord(source_id="fuzz", row_number=1, values=values)
            cleansed = cleanse_record(record, self.lexicons, self.gazetteer, self.schema)
            self.assertEqual(set(cleansed.field_status), {field.name for field in self.schema})

if __name__ == "__main__":
    unittest.main()
