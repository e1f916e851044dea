loginlogController.logout = async (req, res, nxt) => {
  try {
    let token = req.body.token;
    token = token.replace('Bearer ', '');
    await loginlogs.findOneAndUpdate({ token: token },
    {
      $set: { is_active: false, logout_date: Date.now() }
    });
    console.log(token);
    // response elided
  } catch (err) {
    nxt(err);
  }
};
