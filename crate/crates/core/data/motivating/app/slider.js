function getquerySendResponse(sliders) {
  sliderController.SaveSlider = async (req, res, nxt) => {
    try {
      const slider = req.body;
      let id = slugify(slider.slider_key);
      await sliders.findByIdAndUpdate({ id: id },
      {
        $set: slider,
      });
      // response elided
    } catch (err) {
      nxt(err);
    }
  };
}

function slugify(text) {
  return text.toLowerCase().replace(/\s+/g, '-');
}
