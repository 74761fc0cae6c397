"""Named prompt fixtures for driving real models with this toolkit.

The toolkit itself never calls a model for inference; these strings exist so
downstream runners can address the standard evaluation conditions by key and
so the remote slide-text generator sends the canonical generation prompt.
"""

from __future__ import annotations

EVAL_PROMPTS: dict[str, dict[str, str]] = {
    "contextless": {
        "user": "Convert the audio to text.",
    },
    "slide-text": {
        "user": (
            "The speech is the speaker's talk accompanied by a slide, with the text "
            "of the slide being: {}\n"
            "Transcribe the speech into text by integrating the speech with the slide content."
        ),
    },
    "slide-image": {
        "user": "Taking the image content into account, convert the audio to text.",
    },
    "vapo": {
        "system": (
            "Your task is to convert the speech into text, and the image serves as "
            "the reference content related to the speech."
        ),
        "user": (
            "First, recognize the text in the image and output it within <think> </think>. "
            "Then, referring to the thinking content, output the speech recognition result "
            "within <answer> </answer>"
        ),
    },
}

SLIDE_TEXT_PROMPT = (
    "Given a domain label and a list of entities, generate a title and a paragraph "
    "for use in a PPT report, with the requirement that the paragraph includes these "
    "entities, Keep paragraphs within 150 words.\n"
    "Domain label:\n"
    "{}\n"
    "List of entities:\n"
    "{}\n"
    "Output format:\n"
    "###\n"
    "Title\n"
    "###\n"
    "Paragraph\n"
)
