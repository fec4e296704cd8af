import json
import os
import shutil
import tempfile
import unittest
from unittest.mock import MagicMock, patch

import requests

from .support import CIVIL_LAW, chat_response, thought

from resources.lib.common import ConfigurationError
from resources.lib.corpus import Document, load_corpus
from resources.lib.providers import (
    ChatClient,
    ChatProvider,
    ChatSettings,
    MissingEntryError,
    ProviderBinding,
    ProviderError,
    ResponseParseError,
    TranscriptStore,
    get_template,
    request_digest,
    suggest_lines,
)
from resources.lib.providers.chat import build_payload
from resources.lib.providers.session import SessionManager, build_retry

SETTINGS = ChatSettings(
    endpoint="https://chat.example/v1/chat/completions",
    model="gpt-4o",
    credential_env="TEST_CHAT_KEY",
    attempts=2,
)
QUERY = "May a buyer rescind a sale contract because of a defect in the goods?"


class TestTemplates(unittest.TestCase):

    def test_yes_no_contract(self):
        template = get_template("confirm")
        self.assertEqual(template.parse_score("YES"), 1.0)
        self.assertEqual(template.parse_score(" no. "), 0.0)
        with self.assertRaises(ResponseParseError):
            template.parse_score("Yes, because the goods were defective.")

    def test_score_contract_takes_the_first_score_line(self):
        template = get_template("normativeness")
        self.assertEqual(template.parse_score("Reasoning first\nScore: 85\nScore: 10"), 85.0)
        self.assertEqual(template.parse_score("42"), 42.0)
        with self.assertRaises(ResponseParseError):
            template.parse_score("Score: 140")

    def test_lines_contract_strips_markers(self):
        template = get_template("suggest-keywords")
        self.assertEqual(template.parse_lines("1. rescission\n- defect\n\n* buyer"), ["rescission", "defect", "buyer"])
        with self.assertRaises(ResponseParseError):
            template.parse_lines("\n  \n")

    def test_contract_mismatch_and_unknown_template(self):
        with self.assertRaises(ConfigurationError):
            get_template("suggest-keywords").parse_score("YES")
        with self.assertRaises(ConfigurationError):
            get_template("confirm").parse_lines("YES")
        with self.assertRaises(ConfigurationError):
            get_template("haiku")

    def test_render(self):
        messages = get_template("confirm").render(query="q", document="text")
        self.assertEqual([m["role"] for m in messages], ["system", "user"])
        self.assertEqual(messages[1]["content"],
                         "Query: q\n\nDocument: text\n\nIs the document relevant to the query? Answer YES or NO only.")


class TestRequestDigest(unittest.TestCase):

    def test_decoding_settings_are_fixed(self):
        payload = build_payload("m", [])
        self.assertEqual((payload["temperature"], payload["top_p"]), (0, 1))
        self.assertEqual((payload["frequency_penalty"], payload["presence_penalty"]), (0, 0))

    def test_digest_ignores_key_order(self):
        a = {"model": "m", "messages": [{"role": "user", "content": "é"}]}
        b = {"messages": [{"content": "é", "role": "user"}], "model": "m"}
        self.assertEqual(request_digest(a), request_digest(b))
        self.assertNotEqual(request_digest(a), request_digest({"model": "n", "messages": a["messages"]}))

    def test_shipped_transcripts_match_rendered_requests(self):
        store = TranscriptStore.load(os.path.join(CIVIL_LAW, "transcripts.jsonl"))
        corpus = {doc.id: doc for doc in load_corpus(os.path.join(CIVIL_LAW, "corpus.jsonl"))}
        template = get_template("confirm")
        expected = {"d1": "YES", "d2": "NO", "d3": "YES"}
        for doc_id, reply in expected.items():
            payload = build_payload("gpt-4o", template.render(query=QUERY, document=corpus[doc_id].text))
            self.assertEqual(store.lookup(request_digest(payload)), reply)


class TestChatClient(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.session = MagicMock()
        self.environ = {"TEST_CHAT_KEY": "sk-test"}

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_replay_never_touches_the_network(self):
        messages = [{"role": "user", "content": "hello"}]
        digest = request_digest(build_payload("gpt-4o", messages))
        client = ChatClient(SETTINGS, "replay", TranscriptStore(entries={digest: "YES"}), session=self.session)
        self.assertEqual(client.complete(messages), "YES")
        self.session.post.assert_not_called()
        self.assertEqual(client.requests_sent, 0)

    def test_replay_miss_is_a_provider_error(self):
        client = ChatClient(SETTINGS, "replay", TranscriptStore(), session=self.session)
        with self.assertRaises(MissingEntryError) as ctx:
            client.complete([{"role": "user", "content": "unseen"}])
        self.assertEqual(ctx.exception.category, "provider")
        self.session.post.assert_not_called()

    def test_live_posts_with_bearer_credential(self):
        self.session.post.return_value = chat_response("NO")
        client = ChatClient(SETTINGS, "live", session=self.session, environ=self.environ)
        self.assertEqual(client.complete([{"role": "user", "content": "hi"}]), "NO")
        args, kwargs = self.session.post.call_args
        self.assertEqual(args[0], SETTINGS.endpoint)
        self.assertEqual(kwargs["headers"]["Authorization"], "Bearer sk-test")
        self.assertEqual(kwargs["json"]["model"], "gpt-4o")
        self.assertEqual(client.requests_sent, 1)

    def test_missing_credential(self):
        client = ChatClient(SETTINGS, "live", session=self.session, environ={})
        with self.assertRaises(ConfigurationError) as ctx:
            client.complete([{"role": "user", "content": "hi"}])
        self.assertIn("TEST_CHAT_KEY", str(ctx.exception))
        self.session.post.assert_not_called()

    def test_transport_failure_is_a_provider_error(self):
        self.session.post.side_effect = requests.exceptions.ConnectionError("refused")
        client = ChatClient(SETTINGS, "live", session=self.session, environ=self.environ)
        with self.assertRaises(ProviderError):
            client.complete([{"role": "user", "content": "hi"}])

    def test_malformed_body_is_a_provider_error(self):
        response = MagicMock()
        response.json.return_value = {"choices": []}
        self.session.post.return_value = response
        client = ChatClient(SETTINGS, "live", session=self.session, environ=self.environ)
        with self.assertRaises(ProviderError):
            client.complete([{"role": "user", "content": "hi"}])

    def test_record_saves_sorted_transcripts(self):
        path = os.path.join(self.tmp, "transcripts.jsonl")
        self.session.post.side_effect = [chat_response("YES"), chat_response("NO")]
        store = TranscriptStore.load(path, missing_ok=True)
        client = ChatClient(SETTINGS, "record", store, session=self.session, environ=self.environ)
        client.complete([{"role": "user", "content": "one"}])
        client.complete([{"role": "user", "content": "two"}])
        client.finish()
        with open(path, encoding="utf-8") as stream:
            records = [json.loads(line) for line in stream]
        self.assertEqual([r["digest"] for r in records], sorted(r["digest"] for r in records))
        self.assertEqual(sorted(r["response"] for r in records), ["NO", "YES"])
        self.assertFalse(store.dirty)

    def test_replay_of_recorded_run_is_identical(self):
        path = os.path.join(self.tmp, "transcripts.jsonl")
        self.session.post.return_value = chat_response("Score: 77")
        recorder = ChatClient(SETTINGS, "record", TranscriptStore(path), session=self.session, environ=self.environ)
        messages = get_template("normativeness").render(document="Drivers must stop.")
        first = recorder.complete(messages)
        recorder.finish()
        replayer = ChatClient(SETTINGS, "replay", TranscriptStore.load(path), session=MagicMock())
        self.assertEqual(replayer.complete(messages), first)

    @patch("resources.lib.providers.session.requests.Session")
    def test_finish_closes_the_session_the_client_opened(self, mock_session):
        mock_session.return_value.post.return_value = chat_response("YES")
        client = ChatClient(SETTINGS, "live", environ=self.environ)
        client.complete([{"role": "user", "content": "hi"}])
        client.finish()
        mock_session.return_value.close.assert_called_once()
        client.finish()
        mock_session.return_value.close.assert_called_once()

    def test_finish_leaves_a_supplied_session_open(self):
        self.session.post.return_value = chat_response("YES")
        client = ChatClient(SETTINGS, "live", session=self.session, environ=self.environ)
        client.complete([{"role": "user", "content": "hi"}])
        client.finish()
        self.session.close.assert_not_called()

    def test_mode_validation(self):
        with self.assertRaises(ConfigurationError):
            ChatClient(SETTINGS, "offline")
        with self.assertRaises(ConfigurationError):
            ChatClient(SETTINGS, "replay")


class TestChatProvider(unittest.TestCase):

    def test_scores_through_the_template(self):
        client = MagicMock()
        client.complete.return_value = "yes"
        provider = ChatProvider(client)
        t = thought("c1", binary=True, criterion="concerns rescission")
        score = provider.score(Document("d1", "text"), t, "q", ProviderBinding("chat", {"template": "criterion"}))
        self.assertEqual(score, 1.0)
        messages = client.complete.call_args[0][0]
        self.assertIn("Criterion: concerns rescission", messages[1]["content"])

    def test_suggest_lines(self):
        client = MagicMock()
        client.complete.return_value = "rescission\ndefect"
        self.assertEqual(suggest_lines(client, get_template("suggest-keywords"), "q", 2), ["rescission", "defect"])


class TestSessionManager(unittest.TestCase):

    def test_retry_counts_the_first_attempt(self):
        retry = build_retry(3)
        self.assertEqual(retry.total, 2)
        self.assertIn(429, retry.status_forcelist)

    @patch("resources.lib.providers.session.requests.Session")
    def test_session_is_created_once(self, mock_session):
        manager = SessionManager(attempts=2, pool_size=2)
        first = manager.get_session()
        self.assertIs(manager.get_session(), first)
        mock_session.assert_called_once()
        manager.close()
        first.close.assert_called_once()


if __name__ == "__main__":
    unittest.main()
